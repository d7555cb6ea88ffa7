#include "sgp/spectral.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sgp/error.hpp"
#include "sgp/pushsum.hpp"
#include "sgp/rng.hpp"

namespace sgp {

std::vector<double> singular_values(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  const Eigen::VectorXd s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

double lambda2_of_matrix(const Matrix& m) {
  const auto s = singular_values(m);
  return s.size() > 1 ? s[1] * s[1] : 0.0;
}

std::vector<double> singular_values_of_product(const MixingSchedule& schedule, long start,
                                               int window) {
  if (window < 1) throw ConfigError("singular_values_of_product: window must be >= 1");
  std::vector<Matrix> factors;
  factors.reserve(static_cast<std::size_t>(window));
  for (int t = 0; t < window; ++t) factors.push_back(schedule.matrix(start + t).weights());
  return singular_values(ordered_product(factors));
}

double lambda2_of_product(const MixingSchedule& schedule, long start, int window) {
  const auto s = singular_values_of_product(schedule, start, window);
  return s.size() > 1 ? s[1] * s[1] : 0.0;
}

MixingMatrix complete_cycling(int n, long k) {
  if (n < 2) throw TopologyError("complete_cycling: need n >= 2");
  const long c = (k % (n - 1)) + 1;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) += 0.5;
    m(static_cast<int>((i + c) % n), i) += 0.5;
  }
  return MixingMatrix(std::move(m));
}

MonteCarloEstimate expected_lambda2_random(RandomScheme scheme, int n, int window, int trials,
                                           std::uint64_t seed) {
  if (trials < 1) throw ConfigError("expected_lambda2_random: trials must be >= 1");
  if (n < 2) throw TopologyError("expected_lambda2_random: need n >= 2");
  const int period = exponential_period(n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(mix64(seed, static_cast<std::uint64_t>(t)));
    std::vector<Matrix> factors;
    factors.reserve(static_cast<std::size_t>(window));
    for (int w = 0; w < window; ++w) {
      Matrix m(n, n);
      for (int i = 0; i < n; ++i) {
        long target;
        if (scheme == RandomScheme::ExponentialNeighbor) {
          std::uniform_int_distribution<int> pick(0, period - 1);
          target = (i + (1L << pick(rng))) % n;
        } else {
          std::uniform_int_distribution<int> pick(1, n - 1);
          target = (i + pick(rng)) % n;
        }
        m(i, i) += 0.5;
        m(static_cast<int>(target), i) += 0.5;
      }
      factors.push_back(std::move(m));
    }
    const auto s = singular_values(ordered_product(factors));
    const double lambda2 = s[1] * s[1];
    sum += lambda2;
    sum_sq += lambda2 * lambda2;
  }
  MonteCarloEstimate est;
  est.trials = trials;
  est.mean = sum / trials;
  const double variance = std::max(0.0, sum_sq / trials - est.mean * est.mean);
  est.stderr_of_mean = std::sqrt(variance / trials);
  return est;
}

ContractionEstimate estimate_contraction(const MixingSchedule& schedule, int dim, long iters,
                                         std::uint64_t seed) {
  const int period = schedule.period();
  if (iters < 2 * period) {
    throw FitWindowError("estimate_contraction: need iters >= 2 * period");
  }
  const int n = schedule.size();

  ContractionEstimate est;
  const Matrix adj = union_adjacency(schedule, 0, period);
  est.contracting = strongly_connected(adj);
  if (est.contracting) {
    int max_degree = 1;
    for (int k = 0; k < period; ++k) {
      max_degree = std::max(max_degree, schedule.matrix(k).max_out_degree());
    }
    const int diameter = graph_diameter(adj);
    const double exponent = static_cast<double>(diameter) * period;
    const double lambda =
        1.0 - n * std::pow(static_cast<double>(max_degree), -exponent);
    est.analytic_q = lambda <= 0.0 ? 0.0 : std::pow(lambda, 1.0 / (exponent + 1.0));
  } else {
    est.analytic_q = std::numeric_limits<double>::quiet_NaN();
  }

  std::mt19937_64 rng(mix64(seed, 0x5FECull));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> init(static_cast<std::size_t>(n), Vector(static_cast<std::size_t>(dim)));
  for (auto& v : init) {
    for (double& c : v) c = normal(rng);
  }
  NetworkState net(init);
  const Vector xbar = net.mean_x();  // conserved under zero-gradient gossip

  auto deviation = [&]() {
    double worst = 0.0;
    for (int i = 0; i < net.size(); ++i) {
      worst = std::max(worst, norm2(diff(net.node(i).z, xbar)));
    }
    return worst;
  };

  std::vector<double> devs;
  devs.push_back(deviation());
  for (long k = 0; k < iters; ++k) {
    gossip_step(net, schedule.matrix(k));
    devs.push_back(deviation());
  }
  const double initial = devs.front();
  if (!(initial > 0.0)) {
    throw FitWindowError("estimate_contraction: initial deviation is zero");
  }
  const double floor = 1e-13 * initial;

  // Fit log dev vs k over k >= 1 down to (and including) the first sample at
  // the numerical floor, so one-shot exact consensus registers as q ~ 0.
  std::vector<std::pair<double, double>> points;
  for (std::size_t k = 1; k < devs.size(); ++k) {
    const double d = std::max(devs[k], std::numeric_limits<double>::min());
    points.emplace_back(static_cast<double>(k), std::log(d));
    if (devs[k] <= floor) break;
  }
  est.fit_points = static_cast<int>(points.size());
  if (points.size() == 1) {
    est.q_hat = devs[1] / devs[0];
    est.c_hat = initial;
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = points.size();
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    est.q_hat = std::exp(slope);
    est.c_hat = std::exp(intercept);
  }
  if (est.q_hat < 1e-8) est.q_hat = 0.0;  // below the measurement floor
  return est;
}

}  // namespace sgp
