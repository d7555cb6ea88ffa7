#include "sgp/pushsum.hpp"

#include "sgp/error.hpp"

namespace sgp {

NetworkState::NetworkState(std::vector<Vector> init, double w0) {
  nodes_.reserve(init.size());
  for (auto& v : init) {
    NodeState s;
    s.w = w0;
    s.z = v;
    s.x = std::move(v);
    nodes_.push_back(std::move(s));
  }
  for (const auto& s : nodes_) {
    if (s.x.size() != nodes_.front().x.size()) {
      throw ShapeError("NetworkState: inconsistent vector dimensions");
    }
  }
}

Vector NetworkState::mean_x() const {
  Vector mean(static_cast<std::size_t>(dim()), 0.0);
  for (const auto& s : nodes_) add_scaled(mean, 1.0, s.x);
  const double inv = nodes_.empty() ? 0.0 : 1.0 / static_cast<double>(nodes_.size());
  for (double& v : mean) v *= inv;
  return mean;
}

double NetworkState::total_weight() const {
  double sum = 0.0;
  for (const auto& s : nodes_) sum += s.w;
  return sum;
}

void NetworkState::refresh_debiased() {
  for (auto& s : nodes_) s.z = debias(s.x, s.w);
}

Vector debias(const Vector& x, double w) {
  if (w <= 0.0) throw DebiasError("debias: push-sum weight must be positive");
  Vector z(x.size());
  const double inv = 1.0 / w;
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] * inv;
  return z;
}

void gossip_step(NetworkState& net, const MixingMatrix& p) {
  const int n = net.size();
  if (p.size() != n) throw ShapeError("gossip_step: mixing matrix size != node count");
  const int d = net.dim();
  std::vector<Vector> new_x(static_cast<std::size_t>(n), Vector(static_cast<std::size_t>(d), 0.0));
  Vector new_w(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    Vector& xj = new_x[static_cast<std::size_t>(j)];
    double wj = 0.0;
    for (int i = 0; i < n; ++i) {
      const double pji = p.weight(j, i);
      if (pji == 0.0) continue;
      add_scaled(xj, pji, net.node(i).x);
      wj += pji * net.node(i).w;
    }
    new_w[static_cast<std::size_t>(j)] = wj;
  }
  for (int j = 0; j < n; ++j) {
    net.node(j).x = std::move(new_x[static_cast<std::size_t>(j)]);
    net.node(j).w = new_w[static_cast<std::size_t>(j)];
  }
  net.refresh_debiased();
  net.advance_iteration();
}

std::vector<Vector> run_pushsum(const std::vector<Vector>& y0, const MixingSchedule& schedule,
                                long iters) {
  if (iters < 0) throw ConfigError("run_pushsum: iters must be >= 0");
  NetworkState net(y0);
  for (long k = 0; k < iters; ++k) gossip_step(net, schedule.matrix(k));
  std::vector<Vector> z;
  z.reserve(static_cast<std::size_t>(net.size()));
  for (int i = 0; i < net.size(); ++i) z.push_back(net.node(i).z);
  return z;
}

void matrix_form_step(Matrix& x, Vector& w, const Matrix& g, const Matrix& p, double gamma) {
  const int d = x.rows();
  const int m = x.cols();
  if (g.rows() != d || g.cols() != m || p.rows() != m || p.cols() != m ||
      static_cast<int>(w.size()) != m) {
    throw ShapeError("matrix_form_step: dimension mismatch");
  }
  Matrix half(d, m);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < m; ++c) half(r, c) = x(r, c) - gamma * g(r, c);
  }
  Matrix next(d, m);
  Vector next_w(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double pji = p(j, i);
      if (pji == 0.0) continue;
      for (int r = 0; r < d; ++r) next(r, j) += pji * half(r, i);
      next_w[static_cast<std::size_t>(j)] += pji * w[static_cast<std::size_t>(i)];
    }
  }
  x = std::move(next);
  w = std::move(next_w);
}

}  // namespace sgp
