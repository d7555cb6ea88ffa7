#pragma once

#include <string>
#include <vector>

#include "sgp/linalg.hpp"

namespace sgp {

/// Column-stochastic mixing matrix. Entry (j, i) is the weight p_{j,i} the
/// sending node i applies to the message destined for receiving node j, so
/// every column sums to 1 and the diagonal (the self-loop weight) is
/// strictly positive.
class MixingMatrix {
public:
  /// Validates and takes ownership; throws TopologyError when the matrix is
  /// not column-stochastic within `tol`, has entries outside [0, 1], or has
  /// a zero diagonal entry.
  explicit MixingMatrix(Matrix weights, double tol = 1e-12);

  static MixingMatrix identity(int n);

  int size() const { return weights_.rows(); }
  /// p_{receiver, sender}
  double weight(int receiver, int sender) const { return weights_(receiver, sender); }
  const Matrix& weights() const { return weights_; }

  bool doubly_stochastic(double tol = 1e-12) const;
  bool symmetric(double tol = 1e-12) const;
  /// Out-neighbors of `sender` (including itself).
  std::vector<int> out_neighbors(int sender) const;
  int max_out_degree() const;

private:
  Matrix weights_;
};

/// True iff every column of `m` sums to 1 within `tol` and all entries are
/// non-negative. Throws ShapeError for non-square input.
bool validate_column_stochastic(const Matrix& m, double tol = 1e-12);

/// Directed one-peer exponential graph: at iteration k every node i sends to
/// node (i + 2^(k mod period)) mod n with weight 1/2, keeping 1/2 for itself.
MixingMatrix one_peer_exponential(int n, long k);

/// Two-peer variant: weight 1/3 on the diagonal and on the two consecutive
/// exponential offsets (h_k, h_{k+1}).
MixingMatrix two_peer_exponential(int n, long k);

/// Time-varying undirected bipartite exponential graph: odd node o is paired
/// with even node (o + 2^c - 1) mod n, both exchanging with weight 1/2.
/// Symmetric and doubly stochastic; n must be even.
MixingMatrix undirected_bipartite_exponential(int n, long k);

/// Fully mixed matrix with every entry 1/n.
MixingMatrix dense_uniform(int n);

/// Number of distinct exponential offsets {2^0, ..., 2^floor(log2(n-1))}.
int exponential_period(int n);

enum class TopologyKind {
  OnePeerExponential,
  TwoPeerExponential,
  UndirectedBipartiteExponential,
  DenseUniform,
  StaticCustom,
};

std::string to_string(TopologyKind kind);
TopologyKind topology_kind_from_string(const std::string& name);

/// Deterministic generator of the mixing matrix for any iteration index.
/// matrix(k) depends only on (kind, n, k) and is periodic with period().
class MixingSchedule {
public:
  MixingSchedule(TopologyKind kind, int n);
  /// User-supplied static matrix, validated on construction.
  static MixingSchedule static_custom(Matrix weights);

  MixingMatrix matrix(long k) const;
  TopologyKind kind() const { return kind_; }
  int size() const { return n_; }
  int period() const { return period_; }

private:
  MixingSchedule() = default;
  TopologyKind kind_ = TopologyKind::DenseUniform;
  int n_ = 0;
  int period_ = 1;
  std::vector<MixingMatrix> static_matrix_;
};

/// Boolean adjacency (receiver, sender) of the union graph over matrices
/// matrix(k0), ..., matrix(k0 + window - 1).
Matrix union_adjacency(const MixingSchedule& schedule, long k0, int window);

/// Strong connectivity of a directed graph given as a (receiver, sender)
/// adjacency indicator; self-loops are ignored.
bool strongly_connected(const Matrix& adjacency);

/// Longest shortest directed path; throws TopologyError when not strongly
/// connected.
int graph_diameter(const Matrix& adjacency);

}  // namespace sgp
