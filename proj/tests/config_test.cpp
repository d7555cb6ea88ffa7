#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgp/config.hpp"
#include "sgp/error.hpp"

using namespace sgp;

namespace {

const char* kMinimal =
    "# minimal experiment\n"
    "algorithm = sgp\n"
    "topology = one_peer_exponential\n"
    "nodes = 4\n"
    "iters = 100\n"
    "objective = quadratic\n"
    "dimension = 3\n"
    "seed = 7\n";

}  // namespace

TEST_CASE("minimal config parses with resolved defaults") {
  const RunConfig cfg = parse_run_config_text(kMinimal);
  CHECK(cfg.sim.algorithm.algorithm == Algorithm::Sgp);
  CHECK(cfg.sim.algorithm.nodes == 4);
  CHECK(cfg.sim.algorithm.iters == 100);
  CHECK_FALSE(cfg.sim.algorithm.gamma.has_value());
  CHECK(cfg.sim.algorithm.resolved_gamma() == doctest::Approx(std::sqrt(4.0 / 100.0)));
  CHECK(cfg.sim.algorithm.record_every == 1);
  CHECK(cfg.objective.kind == "quadratic");
  CHECK(cfg.sim.cost.compute_time == 1.0);
}

TEST_CASE("unknown keys are rejected with the line number") {
  const std::string text = std::string(kMinimal) + "mystery_knob = 3\n";
  try {
    parse_run_config_text(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 9") != std::string::npos);
    CHECK(what.find("mystery_knob") != std::string::npos);
  }
}

TEST_CASE("invalid values are config errors") {
  CHECK_THROWS_AS(parse_run_config_text(std::string(kMinimal) + "gamma = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text(std::string(kMinimal) + "gamma = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text(std::string(kMinimal) + "delay_mode = sometimes\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("algorithm sgp\n"), ConfigError);
  // dpsgd cannot run on a directed schedule.
  CHECK_THROWS_AS(parse_run_config_text(
                      "algorithm = dpsgd\ntopology = one_peer_exponential\nnodes = 4\n"
                      "iters = 10\nobjective = quadratic\ndimension = 2\n"),
                  ConfigError);
}

TEST_CASE("lr_decay and slowdown lists parse") {
  const std::string text = std::string(kMinimal) +
                           "lr_decay = 30:0.1, 60:0.1\n"
                           "slowdown = 1, 2, 1, 1\n"
                           "spike_prob = 0.25\n"
                           "spike_magnitude = 5\n";
  const RunConfig cfg = parse_run_config_text(text);
  REQUIRE(cfg.sim.algorithm.lr_decay.size() == 2);
  CHECK(cfg.sim.algorithm.lr_decay[0].first == 30);
  CHECK(cfg.sim.algorithm.lr_decay[1].second == doctest::Approx(0.1));
  REQUIRE(cfg.sim.straggler.slowdown.size() == 4);
  CHECK(cfg.sim.straggler.slowdown[1] == 2.0);
  CHECK(cfg.sim.straggler.spike_prob == 0.25);
}

TEST_CASE("resolved config JSON round-trips to the identical run") {
  const std::string text = std::string(kMinimal) +
                           "noise = 0.5\nheterogeneity = 0.3\nrecord_every = 10\n"
                           "transfer_time = 0.2\n";
  const RunConfig original = parse_run_config_text(text);
  const std::string json = resolved_config_json(original);
  const RunConfig reloaded = parse_run_config_text(json);

  // gamma is now explicit and equal to the original resolved value.
  REQUIRE(reloaded.sim.algorithm.gamma.has_value());
  CHECK(*reloaded.sim.algorithm.gamma == original.sim.algorithm.resolved_gamma());

  const auto obj_a = make_objective(original.objective, original.sim.algorithm.nodes,
                                    original.sim.algorithm.seed);
  const auto obj_b = make_objective(reloaded.objective, reloaded.sim.algorithm.nodes,
                                    reloaded.sim.algorithm.seed);
  const TrajectoryReport a = simulate(original.sim, *obj_a);
  const TrajectoryReport b = simulate(reloaded.sim, *obj_b);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].f_mean == b.records[i].f_mean);
    CHECK(a.records[i].consensus_err == b.records[i].consensus_err);
    CHECK(a.records[i].sim_time == b.records[i].sim_time);
  }
}

TEST_CASE("JSON configs are accepted directly") {
  const RunConfig cfg = parse_run_config_text(
      R"({"algorithm": "osgp", "topology": "one_peer_exponential", "nodes": 8,
          "iters": 50, "tau": 2, "objective": "quadratic", "dimension": 4,
          "gamma": 0.05, "seed": 11})");
  CHECK(cfg.sim.algorithm.algorithm == Algorithm::Osgp);
  CHECK(cfg.sim.algorithm.tau == 2);
  CHECK(*cfg.sim.algorithm.gamma == 0.05);
}

TEST_CASE("unknown JSON keys are rejected") {
  CHECK_THROWS_AS(parse_run_config_text(R"({"algorithm": "sgp", "nodes": 2, "iters": 1,
                                            "bogus": 1})"),
                  ConfigError);
}

TEST_CASE("objective factory dispatches on kind") {
  ObjectiveSpec quad;
  quad.kind = "quadratic";
  quad.dimension = 3;
  CHECK(make_objective(quad, 4, 1)->dim() == 3);
  ObjectiveSpec logit;
  logit.kind = "logistic";
  logit.dimension = 2;
  logit.samples = 6;
  CHECK(make_objective(logit, 2, 1)->nodes() == 2);
  ObjectiveSpec bad;
  bad.kind = "cubic";
  CHECK_THROWS_AS(make_objective(bad, 2, 1), ConfigError);
}
