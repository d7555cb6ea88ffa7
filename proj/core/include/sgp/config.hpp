#pragma once

#include <string>

#include "sgp/simulator.hpp"

namespace sgp {

struct ObjectiveSpec {
  std::string kind = "quadratic";  // quadratic | logistic
  int dimension = 2;
  int samples = 8;  // per node
  double heterogeneity = 0.0;
  double noise = 0.0;
};

/// One declarative run description: flat `key = value` lines (or the same
/// keys as a JSON object, which is what resolved_config.json contains).
/// Unknown keys are rejected with the offending line.
struct RunConfig {
  SimulationConfig sim;
  ObjectiveSpec objective;
  std::string static_topology_path;  // from topology = static:PATH
  bool save_problem = false;
};

RunConfig parse_run_config_text(const std::string& text);
RunConfig parse_run_config_file(const std::string& path);

/// All keys written explicitly with defaults resolved (gamma, record_every,
/// cost model, ...); parsing this JSON back reproduces the identical run.
std::string resolved_config_json(const RunConfig& config);

std::unique_ptr<Objective> make_objective(const ObjectiveSpec& spec, int nodes,
                                          std::uint64_t seed);

}  // namespace sgp
