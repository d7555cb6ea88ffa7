#include "sgp/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "sgp/error.hpp"
#include "sgp/rng.hpp"

namespace sgp {

void CostModel::validate() const {
  if (compute_time < 0.0 || transfer_time < 0.0 || allreduce_beta < 0.0) {
    throw ConfigError("cost model times must be >= 0");
  }
}

double StragglerModel::factor(int node, long iteration, std::uint64_t seed) const {
  double f = 1.0;
  if (slowdown.size() == 1) {
    f = slowdown.front();
  } else if (!slowdown.empty()) {
    f = slowdown[static_cast<std::size_t>(node)];
  }
  if (spike_prob > 0.0) {
    const double u = hash_uniform(mix64(seed, 0x5717ull, static_cast<std::uint64_t>(node),
                                        static_cast<std::uint64_t>(iteration)));
    if (u < spike_prob) f *= spike_magnitude;
  }
  return f;
}

void StragglerModel::validate(int nodes) const {
  if (!slowdown.empty() && slowdown.size() != 1 &&
      slowdown.size() != static_cast<std::size_t>(nodes)) {
    throw ConfigError("slowdown list must have 1 or n entries");
  }
  for (double s : slowdown) {
    if (s <= 0.0) throw ConfigError("slowdown multipliers must be > 0");
  }
  if (spike_prob < 0.0 || spike_prob > 1.0) throw ConfigError("spike_prob must be in [0, 1]");
  if (spike_magnitude < 0.0) throw ConfigError("spike_magnitude must be >= 0");
}

void SimulationConfig::validate() const {
  algorithm.validate();
  cost.validate();
  straggler.validate(algorithm.nodes);
}

namespace {

MetricsRecord make_record(long iteration, const Engine& engine, const Objective& obj,
                          double sim_time) {
  const NetworkState& net = engine.network();
  MetricsRecord r;
  r.iteration = iteration;
  r.sim_time = sim_time;
  const Vector xbar = engine.mean_x_with_in_transit();
  r.f_mean = obj.mean_value(xbar);
  r.grad_norm_sq = norm2_sq(obj.mean_gradient(xbar));
  double sum = 0.0;
  double worst = 0.0;
  for (int i = 0; i < net.size(); ++i) {
    const double dev = norm2_sq(diff(net.node(i).z, xbar));
    sum += dev;
    worst = std::max(worst, dev);
  }
  r.consensus_err = sum / net.size();
  r.max_consensus_err = worst;
  return r;
}

}  // namespace

TrajectoryReport simulate(const SimulationConfig& config, const Objective& obj,
                          std::optional<std::vector<Vector>> init) {
  config.validate();
  const AlgorithmConfig& algo = config.algorithm;
  auto engine = Engine::create(algo, obj, std::move(init));

  const int n = algo.nodes;
  std::vector<double> clock(static_cast<std::size_t>(n), 0.0);
  // Compute-finish times per iteration, indexed [iteration][node]; OSGP
  // deliveries reference senders up to tau iterations back.
  std::vector<std::vector<double>> compute_done;
  compute_done.reserve(static_cast<std::size_t>(algo.iters));

  TrajectoryReport report;
  report.records.push_back(make_record(0, *engine, obj, 0.0));
  if (!report.records.back().finite()) {
    report.diverged = true;
  }

  for (long k = 0; k < algo.iters && !report.diverged; ++k) {
    std::vector<double> done(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      done[static_cast<std::size_t>(i)] =
          clock[static_cast<std::size_t>(i)] +
          config.cost.compute_time * config.straggler.factor(i, k, algo.seed);
    }
    compute_done.push_back(done);

    engine->step(k);

    if (engine->synchronizes_all()) {
      const double finish = *std::max_element(done.begin(), done.end()) +
                            config.cost.transfer_time + config.cost.allreduce_beta * n;
      std::fill(clock.begin(), clock.end(), finish);
    } else {
      clock = done;
      for (const Delivery& d : engine->last_deliveries()) {
        const double arrival =
            compute_done[static_cast<std::size_t>(d.sent_at)][static_cast<std::size_t>(d.sender)] +
            config.cost.transfer_time;
        double& t = clock[static_cast<std::size_t>(d.receiver)];
        t = std::max(t, arrival);
      }
    }

    if ((k + 1) % algo.record_every == 0 || k + 1 == algo.iters) {
      const double sim_time = *std::max_element(clock.begin(), clock.end());
      report.records.push_back(make_record(k + 1, *engine, obj, sim_time));
      if (!report.records.back().finite()) report.diverged = true;
    }
  }

  const NetworkState& net = engine->network();
  report.final_mean_x = engine->mean_x_with_in_transit();
  report.final_z.reserve(static_cast<std::size_t>(net.size()));
  for (int i = 0; i < net.size(); ++i) report.final_z.push_back(net.node(i).z);
  return report;
}

std::vector<ComparisonRow> compare(const std::vector<SimulationConfig>& configs,
                                   const Objective& obj) {
  if (configs.empty()) throw ConfigError("compare: empty configuration list");
  std::vector<ComparisonRow> rows;
  rows.reserve(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const TrajectoryReport report = simulate(configs[c], obj);
    rows.push_back({to_string(configs[c].algorithm.algorithm) + "#" + std::to_string(c),
                    report.records.back()});
  }
  return rows;
}

}  // namespace sgp
