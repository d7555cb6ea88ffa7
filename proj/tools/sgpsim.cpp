// Command-line front end: deterministic experiment runs (`run`), PushSum
// averaging (`average`), and mixing-matrix spectral analysis
// (`analyze-topology`). Exit codes: 0 success, 2 invalid configuration or
// input, 3 divergence (non-finite metrics).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgp/config.hpp"
#include "sgp/error.hpp"
#include "sgp/io.hpp"
#include "sgp/spectral.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

std::ofstream open_or_throw(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw sgp::ConfigError("cannot open '" + path.string() + "' for writing");
  return out;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override) {
  sgp::RunConfig config = sgp::parse_run_config_file(config_path);
  if (seed_override) config.sim.algorithm.seed = *seed_override;
  config.sim.validate();

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  open_or_throw(out / "resolved_config.json") << sgp::resolved_config_json(config);

  const auto objective =
      sgp::make_objective(config.objective, config.sim.algorithm.nodes, config.sim.algorithm.seed);
  if (config.save_problem && config.objective.kind == "quadratic") {
    sgp::save_quadratic(dynamic_cast<const sgp::QuadraticProblem&>(*objective),
                        (out / "problem").string());
  }

  const sgp::TrajectoryReport report = sgp::simulate(config.sim, *objective);

  {
    auto metrics = open_or_throw(out / "metrics.csv");
    sgp::write_metrics_csv(report.records, metrics);
  }
  {
    auto jsonl = open_or_throw(out / "metrics.jsonl");
    sgp::write_metrics_jsonl(report.records, jsonl);
  }
  {
    auto state = open_or_throw(out / "final_state.json");
    sgp::write_final_state_json(report, state);
  }

  if (report.diverged) {
    std::cerr << "run diverged: non-finite metrics at iteration "
              << report.records.back().iteration << "\n";
    return kExitDiverged;
  }
  const sgp::MetricsRecord& last = report.records.back();
  std::cout << "iterations " << last.iteration << "  f(x_bar) " << sgp::format_double(last.f_mean)
            << "  consensus_err " << sgp::format_double(last.consensus_err) << "  sim_time "
            << sgp::format_double(last.sim_time) << "\n";
  return kExitOk;
}

sgp::MixingSchedule schedule_from_name(const std::string& topology, int n) {
  if (topology.rfind("static:", 0) == 0) {
    return sgp::MixingSchedule::static_custom(sgp::read_matrix_csv(topology.substr(7)));
  }
  return sgp::MixingSchedule(sgp::topology_kind_from_string(topology), n);
}

int cmd_average(int n, const std::string& topology, long iters, const std::string& input_path) {
  const std::vector<sgp::Vector> y0 = sgp::read_vectors_csv(input_path);
  if (static_cast<int>(y0.size()) != n) {
    throw sgp::ConfigError("input has " + std::to_string(y0.size()) + " rows, expected " +
                           std::to_string(n));
  }
  const sgp::MixingSchedule schedule = schedule_from_name(topology, n);
  if (schedule.size() != n) throw sgp::ConfigError("static matrix size does not match --n");

  const auto z = sgp::run_pushsum(y0, schedule, iters);

  sgp::Vector mean(y0.front().size(), 0.0);
  for (const auto& y : y0) sgp::add_scaled(mean, 1.0, y);
  for (double& v : mean) v /= n;

  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < z[i].size(); ++c) std::cout << (c ? "," : "") << sgp::format_double(z[i][c]);
    std::cout << "\n";
    worst = std::max(worst, sgp::norm2(sgp::diff(z[static_cast<std::size_t>(i)], mean)));
  }
  std::cout << "max_deviation_from_mean " << sgp::format_double(worst) << "\n";
  return kExitOk;
}

int cmd_analyze_topology(const std::string& kind, int n, int window, int trials,
                         std::uint64_t seed, const std::string& dump_dir) {
  nlohmann::ordered_json doc;
  doc["kind"] = kind;
  doc["n"] = n;
  doc["window"] = window;

  const bool random_scheme = kind == "random_exponential_neighbor" ||
                             kind == "random_uniform_neighbor";
  if (random_scheme) {
    const auto scheme = kind == "random_exponential_neighbor"
                            ? sgp::RandomScheme::ExponentialNeighbor
                            : sgp::RandomScheme::UniformNeighbor;
    const auto est = sgp::expected_lambda2_random(scheme, n, window, trials, seed);
    doc["trials"] = est.trials;
    doc["lambda2_mean"] = est.mean;
    doc["lambda2_stderr"] = est.stderr_of_mean;
  } else if (kind == "complete_cycling") {
    std::vector<sgp::Matrix> factors;
    for (int k = 0; k < window; ++k) factors.push_back(sgp::complete_cycling(n, k).weights());
    doc["lambda2"] = sgp::lambda2_of_matrix(sgp::ordered_product(factors));
  } else {
    const sgp::MixingSchedule schedule = schedule_from_name(kind, n);
    doc["lambda2"] = sgp::lambda2_of_product(schedule, 0, window);
    const auto contraction =
        sgp::estimate_contraction(schedule, 4, std::max<long>(2L * schedule.period(), 40), seed);
    doc["contraction"] = {{"q_hat", contraction.q_hat},
                          {"c_hat", contraction.c_hat},
                          {"analytic_q", contraction.contracting
                                             ? nlohmann::json(contraction.analytic_q)
                                             : nlohmann::json()},
                          {"contracting", contraction.contracting}};
    if (!dump_dir.empty()) {
      std::filesystem::create_directories(dump_dir);
      for (int k = 0; k < window; ++k) {
        sgp::write_matrix_csv(schedule.matrix(k).weights(),
                              dump_dir + "/P_" + std::to_string(k) + ".csv");
      }
    }
  }

  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PushSum-based decentralized optimization simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  CLI::App* run = app.add_subcommand("run", "execute a configured experiment");
  run->add_option("config", config_path, "declarative run configuration file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed_override, "override the configured seed");

  int avg_n = 0;
  std::string avg_topology = "one_peer_exponential";
  long avg_iters = 0;
  std::string avg_input;
  CLI::App* average = app.add_subcommand("average", "PushSum distributed averaging");
  average->add_option("--n", avg_n, "node count")->required();
  average->add_option("--topology", avg_topology, "topology kind or static:FILE");
  average->add_option("--iters", avg_iters, "gossip iterations")->required();
  average->add_option("--input", avg_input, "CSV with one initial vector per node")->required();

  std::string ana_kind = "one_peer_exponential";
  int ana_n = 32;
  int ana_window = 5;
  int ana_trials = 500;
  std::uint64_t ana_seed = 0;
  std::string ana_dump;
  CLI::App* analyze = app.add_subcommand("analyze-topology", "spectral report of mixing products");
  analyze->add_option("--kind", ana_kind,
                      "topology kind, complete_cycling, random_exponential_neighbor, "
                      "random_uniform_neighbor, or static:FILE");
  analyze->add_option("--n", ana_n, "node count");
  analyze->add_option("--window", ana_window, "number of matrices in the product")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--trials", ana_trials, "Monte-Carlo trials for random schemes");
  analyze->add_option("--seed", ana_seed, "Monte-Carlo seed");
  analyze->add_option("--dump-matrices", ana_dump, "directory for CSV exports of the window");

  try {
    app.parse(argc, argv);
    if (*run) return cmd_run(config_path, out_dir, seed_override);
    if (*average) return cmd_average(avg_n, avg_topology, avg_iters, avg_input);
    return cmd_analyze_topology(ana_kind, ana_n, ana_window, ana_trials, ana_seed, ana_dump);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const sgp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sgp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
