#pragma once

#include <vector>

#include "sgp/linalg.hpp"
#include "sgp/topology.hpp"

namespace sgp {

/// Per-node PushSum triple: numerator x, scalar weight w, de-biased z = x/w.
struct NodeState {
  Vector x;
  double w = 1.0;
  Vector z;
};

class NetworkState {
public:
  NetworkState() = default;
  /// Initializes x_i = z_i = init[i] and w_i = w0 (1 by convention).
  explicit NetworkState(std::vector<Vector> init, double w0 = 1.0);

  int size() const { return static_cast<int>(nodes_.size()); }
  int dim() const { return nodes_.empty() ? 0 : static_cast<int>(nodes_.front().x.size()); }
  long iteration() const { return iteration_; }
  void advance_iteration() { ++iteration_; }

  NodeState& node(int i) { return nodes_[static_cast<std::size_t>(i)]; }
  const NodeState& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

  /// Node-wise average of the biased parameters, x-bar = (1/n) sum_i x_i.
  Vector mean_x() const;
  double total_weight() const;
  /// Recomputes z_i = x_i / w_i for every node.
  void refresh_debiased();

private:
  std::vector<NodeState> nodes_;
  long iteration_ = 0;
};

/// x / w elementwise; throws DebiasError when w <= 0.
Vector debias(const Vector& x, double w);

/// One PushSum mixing step: x_j <- sum_i p_{j,i} x_i and w_j <- sum_i p_{j,i} w_i,
/// summed in ascending sender order so results are bit-reproducible, then
/// z refreshed and the iteration counter advanced.
void gossip_step(NetworkState& net, const MixingMatrix& p);

/// Runs `iters` gossip steps of the schedule from y0 (weights 1) and returns
/// the de-biased vectors z_i.
std::vector<Vector> run_pushsum(const std::vector<Vector>& y0, const MixingSchedule& schedule,
                                long iters);

/// Global matrix form of one SGP iteration, the reference oracle for the
/// per-node engines: X <- (X - gamma * G) * P^T and W <- P * W, where X and G
/// are d x m with one column per (possibly virtual) node and P is an m x m
/// column-stochastic matrix.
void matrix_form_step(Matrix& x, Vector& w, const Matrix& g, const Matrix& p, double gamma);

}  // namespace sgp
