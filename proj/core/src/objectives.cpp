#include "sgp/objectives.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "sgp/error.hpp"
#include "sgp/io.hpp"
#include "sgp/rng.hpp"

namespace sgp {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  }
  return e;
}

}  // namespace

Objective::Objective(int nodes, int dim, double sigma)
    : nodes_(nodes), dim_(dim), sigma_(sigma) {
  if (nodes < 1 || dim < 1) throw ConfigError("Objective: need nodes >= 1 and dim >= 1");
  if (sigma < 0.0) throw ConfigError("Objective: noise sigma must be >= 0");
}

Vector Objective::stochastic_gradient(int node, const Vector& x, std::mt19937_64& rng) const {
  Vector g = gradient(node, x);
  if (sigma_ > 0.0) {
    std::normal_distribution<double> normal(0.0, sigma_ / std::sqrt(static_cast<double>(dim_)));
    for (double& v : g) v += normal(rng);
  }
  return g;
}

double Objective::mean_value(const Vector& x) const {
  double sum = 0.0;
  for (int i = 0; i < nodes_; ++i) sum += value(i, x);
  return sum / static_cast<double>(nodes_);
}

Vector Objective::mean_gradient(const Vector& x) const {
  Vector g(x.size(), 0.0);
  for (int i = 0; i < nodes_; ++i) add_scaled(g, 1.0, gradient(i, x));
  for (double& v : g) v /= static_cast<double>(nodes_);
  return g;
}

QuadraticProblem::QuadraticProblem(Matrix a, std::vector<Vector> b, double sigma)
    : Objective(static_cast<int>(b.size()), a.cols(), sigma), a_(std::move(a)), b_(std::move(b)) {
  for (const auto& bi : b_) {
    if (static_cast<int>(bi.size()) != a_.rows()) {
      throw ShapeError("QuadraticProblem: target length != sample count");
    }
  }
  const Eigen::MatrixXd ae = to_eigen(a_);
  const int n = nodes();
  Eigen::MatrixXd normal = static_cast<double>(n) * (ae.transpose() * ae);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim());
  Eigen::VectorXd bbar = Eigen::VectorXd::Zero(a_.rows());
  for (const auto& bi : b_) {
    Eigen::VectorXd be = Eigen::Map<const Eigen::VectorXd>(bi.data(), a_.rows());
    rhs += ae.transpose() * be;
    bbar += be;
  }
  bbar /= static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
  set_smoothness(eig.eigenvalues().maxCoeff());
  if (eig.eigenvalues().minCoeff() < 1e-8) {
    normal += 1e-8 * Eigen::MatrixXd::Identity(dim(), dim());
    ridge_regularized_ = true;
  }
  const Eigen::VectorXd xstar = normal.ldlt().solve(rhs);
  set_minimizer(Vector(xstar.data(), xstar.data() + dim()));

  double zeta_sq = 0.0;
  for (const auto& bi : b_) {
    Eigen::VectorXd be = Eigen::Map<const Eigen::VectorXd>(bi.data(), a_.rows());
    zeta_sq += (ae.transpose() * (be - bbar)).squaredNorm();
  }
  set_heterogeneity_sq(zeta_sq / static_cast<double>(n));
}

double QuadraticProblem::value(int node, const Vector& x) const {
  const auto& b = b_[static_cast<std::size_t>(node)];
  double sum = 0.0;
  for (int r = 0; r < a_.rows(); ++r) {
    double residual = -b[static_cast<std::size_t>(r)];
    for (int c = 0; c < a_.cols(); ++c) residual += a_(r, c) * x[static_cast<std::size_t>(c)];
    sum += residual * residual;
  }
  return 0.5 * sum;
}

Vector QuadraticProblem::gradient(int node, const Vector& x) const {
  const auto& b = b_[static_cast<std::size_t>(node)];
  Vector g(x.size(), 0.0);
  for (int r = 0; r < a_.rows(); ++r) {
    double residual = -b[static_cast<std::size_t>(r)];
    for (int c = 0; c < a_.cols(); ++c) residual += a_(r, c) * x[static_cast<std::size_t>(c)];
    for (int c = 0; c < a_.cols(); ++c) g[static_cast<std::size_t>(c)] += a_(r, c) * residual;
  }
  return g;
}

std::unique_ptr<QuadraticProblem> make_quadratic(int nodes, int dim, int samples,
                                                 double heterogeneity, double noise,
                                                 std::uint64_t seed) {
  if (nodes < 1 || dim < 1 || samples < 1) {
    throw ConfigError("make_quadratic: need nodes, dim, samples >= 1");
  }
  if (heterogeneity < 0.0 || noise < 0.0) {
    throw ConfigError("make_quadratic: heterogeneity and noise must be >= 0");
  }
  std::mt19937_64 rng(mix64(seed, 0x51ADull));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(samples));
  Matrix a(samples, dim);
  for (int r = 0; r < samples; ++r) {
    for (int c = 0; c < dim; ++c) a(r, c) = scale * normal(rng);
  }
  Vector b0(static_cast<std::size_t>(samples));
  for (double& v : b0) v = normal(rng);
  std::vector<Vector> b(static_cast<std::size_t>(nodes), b0);
  for (auto& bi : b) {
    for (double& v : bi) v += heterogeneity * normal(rng);
  }
  return std::make_unique<QuadraticProblem>(std::move(a), std::move(b), noise);
}

LogisticProblem::LogisticProblem(std::vector<Matrix> features,
                                 std::vector<std::vector<int>> labels, double l2_penalty,
                                 double sigma)
    : Objective(static_cast<int>(features.size()),
                features.empty() ? 1 : features.front().cols(), sigma),
      features_(std::move(features)),
      labels_(std::move(labels)),
      l2_penalty_(l2_penalty) {
  if (features_.size() != labels_.size()) throw ShapeError("LogisticProblem: node count mismatch");
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].rows() == 0) throw ConfigError("LogisticProblem: empty dataset");
    if (features_[i].rows() != static_cast<int>(labels_[i].size())) {
      throw ShapeError("LogisticProblem: feature/label count mismatch");
    }
  }
  // L for node i is bounded by lambda_max(X_i^T X_i) / (4 s_i) + penalty.
  double l = 0.0;
  for (const auto& xi : features_) {
    const Eigen::MatrixXd xe = to_eigen(xi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(xe.transpose() * xe);
    l = std::max(l, eig.eigenvalues().maxCoeff() / (4.0 * xi.rows()) + l2_penalty_);
  }
  set_smoothness(l);

  // Reference minimizer: centralized gradient descent until stationarity.
  Vector x(static_cast<std::size_t>(dim()), 0.0);
  const double step = 1.0 / l;
  for (int it = 0; it < 200000; ++it) {
    Vector g = mean_gradient(x);
    if (norm2(g) < 1e-12) break;
    add_scaled(x, -step, g);
  }
  set_minimizer(std::move(x));

  std::mt19937_64 probe_rng(0xBEEF);
  std::normal_distribution<double> normal(0.0, 1.0);
  double zeta = 0.0;
  const int probes = 16;
  for (int p = 0; p < probes; ++p) {
    Vector xp(static_cast<std::size_t>(dim()));
    for (double& v : xp) v = normal(probe_rng);
    zeta = std::max(zeta, measured_heterogeneity_sq(*this, xp));
  }
  set_heterogeneity_sq(zeta);
}

double LogisticProblem::value(int node, const Vector& x) const {
  const Matrix& feat = features_[static_cast<std::size_t>(node)];
  const auto& lab = labels_[static_cast<std::size_t>(node)];
  double sum = 0.0;
  for (int r = 0; r < feat.rows(); ++r) {
    double margin = 0.0;
    for (int c = 0; c < feat.cols(); ++c) margin += feat(r, c) * x[static_cast<std::size_t>(c)];
    margin *= lab[static_cast<std::size_t>(r)];
    sum += margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
  }
  return sum / feat.rows() + 0.5 * l2_penalty_ * norm2_sq(x);
}

Vector LogisticProblem::gradient(int node, const Vector& x) const {
  const Matrix& feat = features_[static_cast<std::size_t>(node)];
  const auto& lab = labels_[static_cast<std::size_t>(node)];
  Vector g = scaled(x, l2_penalty_);
  const double inv = 1.0 / feat.rows();
  for (int r = 0; r < feat.rows(); ++r) {
    double margin = 0.0;
    for (int c = 0; c < feat.cols(); ++c) margin += feat(r, c) * x[static_cast<std::size_t>(c)];
    const int y = lab[static_cast<std::size_t>(r)];
    margin *= y;
    const double sig = 1.0 / (1.0 + std::exp(margin));  // sigmoid(-margin)
    const double coeff = -inv * y * sig;
    for (int c = 0; c < feat.cols(); ++c) g[static_cast<std::size_t>(c)] += coeff * feat(r, c);
  }
  return g;
}

std::unique_ptr<LogisticProblem> logistic_problem(int nodes, int dim, int samples_per_node,
                                                  double heterogeneity, std::uint64_t seed,
                                                  double noise) {
  if (nodes < 1 || dim < 1) throw ConfigError("logistic_problem: need nodes, dim >= 1");
  if (samples_per_node < 1) throw ConfigError("logistic_problem: empty dataset");
  std::mt19937_64 rng(mix64(seed, 0x106157ull));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double mu_scale = 2.0 / std::sqrt(static_cast<double>(dim));
  Vector mu(static_cast<std::size_t>(dim));
  for (double& v : mu) v = mu_scale * normal(rng);

  std::vector<Matrix> features;
  std::vector<std::vector<int>> labels;
  for (int i = 0; i < nodes; ++i) {
    Vector mu_i = mu;
    for (double& v : mu_i) v += heterogeneity * mu_scale * normal(rng);
    Matrix feat(samples_per_node, dim);
    std::vector<int> lab(static_cast<std::size_t>(samples_per_node));
    for (int s = 0; s < samples_per_node; ++s) {
      const int y = (s % 2 == 0) ? 1 : -1;
      lab[static_cast<std::size_t>(s)] = y;
      for (int c = 0; c < dim; ++c) {
        feat(s, c) = y * mu_i[static_cast<std::size_t>(c)] + normal(rng);
      }
    }
    features.push_back(std::move(feat));
    labels.push_back(std::move(lab));
  }
  return std::make_unique<LogisticProblem>(std::move(features), std::move(labels), 0.1, noise);
}

double finite_difference_check(const Objective& obj, int node, const Vector& x, double h) {
  const Vector g = obj.gradient(node, x);
  double worst = 0.0;
  Vector probe = x;
  for (std::size_t c = 0; c < x.size(); ++c) {
    probe[c] = x[c] + h;
    const double up = obj.value(node, probe);
    probe[c] = x[c] - h;
    const double down = obj.value(node, probe);
    probe[c] = x[c];
    worst = std::max(worst, std::abs((up - down) / (2.0 * h) - g[c]));
  }
  return worst;
}

double measured_heterogeneity_sq(const Objective& obj, const Vector& x) {
  const Vector mean = obj.mean_gradient(x);
  double sum = 0.0;
  for (int i = 0; i < obj.nodes(); ++i) {
    sum += norm2_sq(diff(obj.gradient(i, x), mean));
  }
  return sum / obj.nodes();
}

void save_quadratic(const QuadraticProblem& problem, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(problem.design(), dir + "/design.csv");
  write_vectors_csv(problem.targets(), dir + "/targets.csv");
  nlohmann::ordered_json manifest;
  manifest["kind"] = "quadratic";
  manifest["nodes"] = problem.nodes();
  manifest["dim"] = problem.dim();
  manifest["samples"] = problem.samples();
  manifest["noise"] = problem.noise_sigma();
  manifest["ridge_regularized"] = problem.ridge_regularized();
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw ConfigError("save_quadratic: cannot write manifest");
  out << manifest.dump(2) << '\n';
}

std::unique_ptr<QuadraticProblem> load_quadratic(const std::string& dir) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) throw ConfigError("load_quadratic: missing manifest in '" + dir + "'");
  nlohmann::json manifest = nlohmann::json::parse(in);
  if (manifest.at("kind").get<std::string>() != "quadratic") {
    throw ConfigError("load_quadratic: manifest kind is not 'quadratic'");
  }
  Matrix a = read_matrix_csv(dir + "/design.csv");
  std::vector<Vector> b = read_vectors_csv(dir + "/targets.csv");
  return std::make_unique<QuadraticProblem>(std::move(a), std::move(b),
                                            manifest.at("noise").get<double>());
}

}  // namespace sgp
