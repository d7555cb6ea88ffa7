#pragma once

#include <vector>

#include "sgp/linalg.hpp"

namespace sgp {

/// One recorded simulation row. consensus_err is (1/n) sum_i |z_i - x_bar|^2
/// and max_consensus_err is max_i |z_i - x_bar|^2, both against the node-wise
/// average of the biased parameters x_bar = (1/n) sum_i x_i.
struct MetricsRecord {
  long iteration = 0;
  double f_mean = 0.0;
  double grad_norm_sq = 0.0;
  double consensus_err = 0.0;
  double max_consensus_err = 0.0;
  double sim_time = 0.0;

  bool finite() const;
};

struct TrajectoryReport {
  std::vector<MetricsRecord> records;
  std::vector<Vector> final_z;
  Vector final_mean_x;
  bool diverged = false;
};

}  // namespace sgp
