#pragma once

#include <cstdint>
#include <vector>

#include "sgp/linalg.hpp"
#include "sgp/topology.hpp"

namespace sgp {

/// Singular values of a dense matrix, sorted descending.
std::vector<double> singular_values(const Matrix& m);

/// All singular values of the ordered product matrix(start + window - 1) ...
/// matrix(start), sorted descending.
std::vector<double> singular_values_of_product(const MixingSchedule& schedule, long start,
                                               int window);

/// Squared second-largest singular value of a single matrix.
double lambda2_of_matrix(const Matrix& m);

/// Worst-case averaging contraction factor of the ordered product: the
/// squared second-largest singular value, i.e. the second-largest eigenvalue
/// of the product's Gram matrix. For random y0 the squared deviation from
/// the mean after the window is at most this factor times the initial one.
double lambda2_of_product(const MixingSchedule& schedule, long start, int window);

/// Comparator schedule cycling through the edges of the complete graph:
/// every node sends to (i + c) mod n with c = (k mod (n-1)) + 1, weight 1/2.
MixingMatrix complete_cycling(int n, long k);

enum class RandomScheme {
  /// Each node picks one exponential-graph offset uniformly per iteration.
  ExponentialNeighbor,
  /// Each node picks a destination uniformly among all other nodes.
  UniformNeighbor,
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  int trials = 0;
};

/// Monte-Carlo mean of lambda2 over `trials` independent random schedules
/// of `window` matrices.
MonteCarloEstimate expected_lambda2_random(RandomScheme scheme, int n, int window, int trials,
                                           std::uint64_t seed);

struct ContractionEstimate {
  /// Fitted constant and per-iteration ratio of the geometric decay of
  /// max_i |z_i - x_bar| under zero-gradient PushSum.
  double c_hat = 0.0;
  double q_hat = 1.0;
  /// Worst-case ratio q = lambda^(1/(DB+1)) with lambda = 1 - n D^(-DB)
  /// from the mixing-connectivity bound (delay-free, D = max out-degree,
  /// B = period, Delta = union-graph diameter); NaN when disconnected.
  double analytic_q = 1.0;
  /// Strong connectivity of the union graph over one period.
  bool contracting = false;
  int fit_points = 0;
};

/// Runs zero-gradient PushSum from seeded random initial vectors and fits
/// log max_i |z_i - x_bar| against the iteration index over the region above
/// the numerical floor. Requires iters >= 2 * period.
ContractionEstimate estimate_contraction(const MixingSchedule& schedule, int dim, long iters,
                                         std::uint64_t seed);

}  // namespace sgp
