#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgp/algorithms.hpp"
#include "sgp/metrics.hpp"
#include "sgp/objectives.hpp"

namespace sgp {

/// Deterministic communication cost model: each gradient costs compute_time
/// (scaled by the node's slowdown), each point-to-point message costs
/// transfer_time, and an AllReduce round costs transfer_time +
/// allreduce_beta * n.
struct CostModel {
  double compute_time = 1.0;
  double transfer_time = 0.0;
  double allreduce_beta = 0.0;

  void validate() const;
};

/// Per-node slowdown multipliers plus an iteration-level spike: with
/// probability spike_prob a node's compute time is further multiplied by
/// spike_magnitude. Spikes are a stateless hash of (seed, node, iteration).
struct StragglerModel {
  std::vector<double> slowdown;  // empty = all 1; one entry = broadcast
  double spike_prob = 0.0;
  double spike_magnitude = 1.0;

  double factor(int node, long iteration, std::uint64_t seed) const;
  void validate(int nodes) const;
};

struct SimulationConfig {
  AlgorithmConfig algorithm;
  CostModel cost;
  StragglerModel straggler;

  void validate() const;
};

/// Drives the configured engine for algorithm.iters iterations under the
/// cost model. Per-node clocks advance by the compute time and by waiting
/// for the messages incorporated that iteration (AllReduce waits for every
/// node); sim_time is the max over node clocks. Recording stops early with
/// diverged = true when a recorded row turns non-finite.
TrajectoryReport simulate(const SimulationConfig& config, const Objective& obj,
                          std::optional<std::vector<Vector>> init = std::nullopt);

struct ComparisonRow {
  std::string label;
  MetricsRecord final_record;
};

/// Runs each configuration against the same objective and returns the final
/// metrics row per configuration.
std::vector<ComparisonRow> compare(const std::vector<SimulationConfig>& configs,
                                   const Objective& obj);

}  // namespace sgp
