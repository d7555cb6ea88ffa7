#include "sgp/topology.hpp"

#include <cmath>
#include <deque>

#include "sgp/error.hpp"

namespace sgp {

namespace {

void check_square(const Matrix& m, const char* who) {
  if (!m.square()) throw ShapeError(std::string(who) + ": matrix is not square");
}

}  // namespace

bool validate_column_stochastic(const Matrix& m, double tol) {
  check_square(m, "validate_column_stochastic");
  for (int i = 0; i < m.cols(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < m.rows(); ++j) {
      const double v = m(j, i);
      if (v < 0.0) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

MixingMatrix::MixingMatrix(Matrix weights, double tol) : weights_(std::move(weights)) {
  check_square(weights_, "MixingMatrix");
  if (!validate_column_stochastic(weights_, tol)) {
    throw TopologyError("MixingMatrix: matrix is not column-stochastic");
  }
  for (int i = 0; i < weights_.rows(); ++i) {
    for (int j = 0; j < weights_.cols(); ++j) {
      if (weights_(i, j) > 1.0 + tol) throw TopologyError("MixingMatrix: entry above 1");
    }
    if (weights_(i, i) <= 0.0) {
      throw TopologyError("MixingMatrix: diagonal entry must be strictly positive (self-loop)");
    }
  }
}

MixingMatrix MixingMatrix::identity(int n) { return MixingMatrix(Matrix::identity(n)); }

bool MixingMatrix::doubly_stochastic(double tol) const {
  for (int j = 0; j < weights_.rows(); ++j) {
    double sum = 0.0;
    for (int i = 0; i < weights_.cols(); ++i) sum += weights_(j, i);
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

bool MixingMatrix::symmetric(double tol) const {
  for (int i = 0; i < weights_.rows(); ++i) {
    for (int j = 0; j < i; ++j) {
      if (std::abs(weights_(i, j) - weights_(j, i)) > tol) return false;
    }
  }
  return true;
}

std::vector<int> MixingMatrix::out_neighbors(int sender) const {
  std::vector<int> out;
  for (int j = 0; j < size(); ++j) {
    if (weights_(j, sender) > 0.0) out.push_back(j);
  }
  return out;
}

int MixingMatrix::max_out_degree() const {
  int best = 0;
  for (int i = 0; i < size(); ++i) {
    int deg = 0;
    for (int j = 0; j < size(); ++j) deg += weights_(j, i) > 0.0 ? 1 : 0;
    best = std::max(best, deg);
  }
  return best;
}

int exponential_period(int n) {
  if (n < 2) throw TopologyError("exponential_period: need n >= 2");
  return static_cast<int>(std::floor(std::log2(static_cast<double>(n - 1)))) + 1;
}

MixingMatrix one_peer_exponential(int n, long k) {
  if (n < 2) throw TopologyError("one_peer_exponential: need n >= 2");
  const int period = exponential_period(n);
  const long h = 1L << (k % period);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) += 0.5;
    m(static_cast<int>((i + h) % n), i) += 0.5;
  }
  return MixingMatrix(std::move(m));
}

MixingMatrix two_peer_exponential(int n, long k) {
  if (n < 3) throw TopologyError("two_peer_exponential: need n >= 3");
  const int period = exponential_period(n);
  const long h1 = 1L << (k % period);
  const long h2 = 1L << ((k + 1) % period);
  if (h1 % n == h2 % n || h1 % n == 0 || h2 % n == 0) {
    throw TopologyError("two_peer_exponential: offset collision modulo n");
  }
  Matrix m(n, n);
  const double w = 1.0 / 3.0;
  for (int i = 0; i < n; ++i) {
    m(i, i) += w;
    m(static_cast<int>((i + h1) % n), i) += w;
    m(static_cast<int>((i + h2) % n), i) += w;
  }
  return MixingMatrix(std::move(m));
}

MixingMatrix undirected_bipartite_exponential(int n, long k) {
  if (n < 2 || n % 2 != 0) {
    throw TopologyError("undirected_bipartite_exponential: need even n >= 2");
  }
  const int period = std::max(1, exponential_period(n) - 1);
  const long c = (k % period) + 1;
  const long delta = (1L << c) - 1;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 0.5;
  for (int odd = 1; odd < n; odd += 2) {
    const int even = static_cast<int>((odd + delta) % n);
    m(even, odd) = 0.5;
    m(odd, even) = 0.5;
  }
  return MixingMatrix(std::move(m));
}

MixingMatrix dense_uniform(int n) {
  if (n < 1) throw TopologyError("dense_uniform: need n >= 1");
  return MixingMatrix(Matrix(n, n, 1.0 / n));
}

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::OnePeerExponential: return "one_peer_exponential";
    case TopologyKind::TwoPeerExponential: return "two_peer_exponential";
    case TopologyKind::UndirectedBipartiteExponential: return "undirected_bipartite_exponential";
    case TopologyKind::DenseUniform: return "dense_uniform";
    case TopologyKind::StaticCustom: return "static_custom";
  }
  throw ConfigError("to_string: unknown topology kind");
}

TopologyKind topology_kind_from_string(const std::string& name) {
  if (name == "one_peer_exponential") return TopologyKind::OnePeerExponential;
  if (name == "two_peer_exponential") return TopologyKind::TwoPeerExponential;
  if (name == "undirected_bipartite_exponential") return TopologyKind::UndirectedBipartiteExponential;
  if (name == "dense_uniform") return TopologyKind::DenseUniform;
  if (name == "static_custom") return TopologyKind::StaticCustom;
  throw ConfigError("unknown topology kind '" + name + "'");
}

MixingSchedule::MixingSchedule(TopologyKind kind, int n) : kind_(kind), n_(n) {
  switch (kind) {
    case TopologyKind::OnePeerExponential:
      if (n < 2) throw TopologyError("one_peer_exponential: need n >= 2");
      period_ = exponential_period(n);
      break;
    case TopologyKind::TwoPeerExponential:
      if (n < 3) throw TopologyError("two_peer_exponential: need n >= 3");
      period_ = exponential_period(n);
      break;
    case TopologyKind::UndirectedBipartiteExponential:
      if (n < 2 || n % 2 != 0) {
        throw TopologyError("undirected_bipartite_exponential: need even n >= 2");
      }
      period_ = std::max(1, exponential_period(n) - 1);
      break;
    case TopologyKind::DenseUniform:
      if (n < 1) throw TopologyError("dense_uniform: need n >= 1");
      period_ = 1;
      break;
    case TopologyKind::StaticCustom:
      throw TopologyError("use MixingSchedule::static_custom for user matrices");
  }
}

MixingSchedule MixingSchedule::static_custom(Matrix weights) {
  MixingSchedule s;
  s.kind_ = TopologyKind::StaticCustom;
  s.n_ = weights.rows();
  s.period_ = 1;
  s.static_matrix_.emplace_back(std::move(weights));  // validates
  return s;
}

MixingMatrix MixingSchedule::matrix(long k) const {
  switch (kind_) {
    case TopologyKind::OnePeerExponential: return one_peer_exponential(n_, k);
    case TopologyKind::TwoPeerExponential: return two_peer_exponential(n_, k);
    case TopologyKind::UndirectedBipartiteExponential:
      return undirected_bipartite_exponential(n_, k);
    case TopologyKind::DenseUniform: return dense_uniform(n_);
    case TopologyKind::StaticCustom: return static_matrix_.front();
  }
  throw TopologyError("MixingSchedule: unknown kind");
}

Matrix union_adjacency(const MixingSchedule& schedule, long k0, int window) {
  Matrix adj(schedule.size(), schedule.size());
  for (int t = 0; t < window; ++t) {
    const MixingMatrix p = schedule.matrix(k0 + t);
    for (int j = 0; j < p.size(); ++j) {
      for (int i = 0; i < p.size(); ++i) {
        if (p.weight(j, i) > 0.0) adj(j, i) = 1.0;
      }
    }
  }
  return adj;
}

namespace {

// Directed BFS distances from `source` along sender -> receiver edges.
std::vector<int> bfs_distances(const Matrix& adjacency, int source) {
  const int n = adjacency.rows();
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::deque<int> frontier{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v = 0; v < n; ++v) {
      if (v != u && adjacency(v, u) > 0.0 && dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace

bool strongly_connected(const Matrix& adjacency) {
  check_square(adjacency, "strongly_connected");
  const int n = adjacency.rows();
  for (int s = 0; s < n; ++s) {
    for (int d : bfs_distances(adjacency, s)) {
      if (d < 0) return false;
    }
  }
  return true;
}

int graph_diameter(const Matrix& adjacency) {
  check_square(adjacency, "graph_diameter");
  const int n = adjacency.rows();
  int diameter = 0;
  for (int s = 0; s < n; ++s) {
    for (int d : bfs_distances(adjacency, s)) {
      if (d < 0) throw TopologyError("graph_diameter: graph is not strongly connected");
      diameter = std::max(diameter, d);
    }
  }
  return diameter;
}

}  // namespace sgp
