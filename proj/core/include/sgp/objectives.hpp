#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sgp/linalg.hpp"

namespace sgp {

/// A stochastic consensus objective f = (1/n) sum_i f_i with per-node
/// components and an unbiased stochastic gradient oracle. The noise model is
/// additive Gaussian with covariance (sigma^2/d) I, so the oracle's variance
/// is exactly sigma^2 at every point.
class Objective {
public:
  virtual ~Objective() = default;

  int nodes() const { return nodes_; }
  int dim() const { return dim_; }
  double noise_sigma() const { return sigma_; }
  /// Smoothness constant L valid for every f_i.
  double smoothness() const { return smoothness_; }
  /// Exact heterogeneity bound zeta^2 = sup_x (1/n) sum_i |grad f_i - grad f|^2
  /// when available, otherwise an empirical estimate.
  double heterogeneity_sq() const { return heterogeneity_sq_; }
  const std::optional<Vector>& minimizer() const { return minimizer_; }

  virtual double value(int node, const Vector& x) const = 0;
  virtual Vector gradient(int node, const Vector& x) const = 0;

  Vector stochastic_gradient(int node, const Vector& x, std::mt19937_64& rng) const;

  double mean_value(const Vector& x) const;
  Vector mean_gradient(const Vector& x) const;

protected:
  Objective(int nodes, int dim, double sigma);
  void set_smoothness(double l) { smoothness_ = l; }
  void set_heterogeneity_sq(double z) { heterogeneity_sq_ = z; }
  void set_minimizer(Vector x) { minimizer_ = std::move(x); }

private:
  int nodes_;
  int dim_;
  double sigma_;
  double smoothness_ = 0.0;
  double heterogeneity_sq_ = 0.0;
  std::optional<Vector> minimizer_;
};

/// Least-squares components f_i(x) = 0.5 |A x - b_i|^2 with a curvature
/// matrix A shared by all nodes and per-node targets b_i = b0 + zeta_scale *
/// shift_i, so heterogeneity translates the local minimizers without touching
/// curvature and zeta^2 is exact and x-independent.
class QuadraticProblem : public Objective {
public:
  QuadraticProblem(Matrix a, std::vector<Vector> b, double sigma);

  double value(int node, const Vector& x) const override;
  Vector gradient(int node, const Vector& x) const override;

  const Matrix& design() const { return a_; }
  const std::vector<Vector>& targets() const { return b_; }
  int samples() const { return a_.rows(); }
  bool ridge_regularized() const { return ridge_regularized_; }

private:
  Matrix a_;
  std::vector<Vector> b_;
  bool ridge_regularized_ = false;
  friend std::unique_ptr<QuadraticProblem> make_quadratic(int, int, int, double, double,
                                                          std::uint64_t);
};

std::unique_ptr<QuadraticProblem> make_quadratic(int nodes, int dim, int samples,
                                                 double heterogeneity, double noise,
                                                 std::uint64_t seed);

/// l2-regularized logistic regression on synthetic two-class Gaussian mixture
/// data partitioned across nodes; heterogeneity shifts each node's class
/// means. The reference minimizer comes from a long centralized
/// gradient-descent run at construction.
class LogisticProblem : public Objective {
public:
  LogisticProblem(std::vector<Matrix> features, std::vector<std::vector<int>> labels,
                  double l2_penalty, double sigma);

  double value(int node, const Vector& x) const override;
  Vector gradient(int node, const Vector& x) const override;

  double l2_penalty() const { return l2_penalty_; }
  const std::vector<Matrix>& features() const { return features_; }
  const std::vector<std::vector<int>>& labels() const { return labels_; }

private:
  std::vector<Matrix> features_;
  std::vector<std::vector<int>> labels_;
  double l2_penalty_;
};

std::unique_ptr<LogisticProblem> logistic_problem(int nodes, int dim, int samples_per_node,
                                                  double heterogeneity, std::uint64_t seed,
                                                  double noise = 0.0);

/// Max coordinate error between the analytic gradient of f_node and central
/// finite differences with step h (the noise-free value() is differentiated,
/// so sigma plays no role).
double finite_difference_check(const Objective& obj, int node, const Vector& x, double h);

/// (1/n) sum_i |grad f_i(x) - grad f(x)|^2 evaluated directly.
double measured_heterogeneity_sq(const Objective& obj, const Vector& x);

/// Portable on-disk form: CSV matrices plus a JSON manifest in `dir`.
void save_quadratic(const QuadraticProblem& problem, const std::string& dir);
std::unique_ptr<QuadraticProblem> load_quadratic(const std::string& dir);

}  // namespace sgp
