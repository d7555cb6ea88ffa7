#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sgp/algorithms.hpp"
#include "sgp/error.hpp"
#include "test_util.hpp"

using namespace sgp;

namespace {

// f_i(x) = g . x with a constant gradient; used to hand-check recursions.
class LinearObjective : public Objective {
public:
  LinearObjective(int nodes, Vector g) : Objective(nodes, static_cast<int>(g.size()), 0.0), g_(std::move(g)) {}
  double value(int, const Vector& x) const override { return dot(g_, x); }
  Vector gradient(int, const Vector&) const override { return g_; }

private:
  Vector g_;
};

// Records the points gradients are evaluated at.
class ProbeObjective : public Objective {
public:
  ProbeObjective(int nodes, int dim) : Objective(nodes, dim, 0.0) {}
  double value(int, const Vector&) const override { return 0.0; }
  Vector gradient(int, const Vector& x) const override {
    eval_points.push_back(x);
    return Vector(x.size(), 1.0);
  }
  mutable std::vector<Vector> eval_points;
};

QuadraticProblem zero_objective(int nodes, int dim) {
  return QuadraticProblem(Matrix(2, dim), std::vector<Vector>(static_cast<std::size_t>(nodes), Vector(2, 0.0)), 0.0);
}

AlgorithmConfig base_config(Algorithm a, TopologyKind topo, int n, long iters, double gamma,
                            std::uint64_t seed = 5) {
  AlgorithmConfig cfg;
  cfg.algorithm = a;
  cfg.topology = topo;
  cfg.nodes = n;
  cfg.iters = iters;
  cfg.gamma = gamma;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("single-node SGP is plain SGD") {
  const auto obj = make_quadratic(1, 3, 6, 0.0, 0.0, 7);
  const double gamma = 0.2;
  auto engine = Engine::create(base_config(Algorithm::Sgp, TopologyKind::DenseUniform, 1, 0, gamma), *obj);
  Vector x(3, 0.0);
  for (long k = 0; k < 40; ++k) {
    engine->step(k);
    add_scaled(x, -gamma, obj->gradient(0, x));
    CHECK(test::max_abs_diff(engine->network().node(0).x, x) == 0.0);
  }
}

TEST_CASE("zero gradients reduce sgp_step to gossip_step") {
  std::mt19937_64 rng(3);
  const auto y0 = test::random_vectors(6, 2, rng);
  const QuadraticProblem obj = zero_objective(6, 2);
  const MixingMatrix p(test::random_column_stochastic(6, rng));
  NodeRngs rngs(1, 6);

  NetworkState via_sgp(y0);
  sgp_step(via_sgp, p, obj, 0.3, rngs);
  NetworkState via_gossip(y0);
  gossip_step(via_gossip, p);
  for (int i = 0; i < 6; ++i) {
    CHECK(test::max_abs_diff(via_sgp.node(i).x, via_gossip.node(i).x) == 0.0);
    CHECK(via_sgp.node(i).w == via_gossip.node(i).w);
  }
}

TEST_CASE("sgp on the fully uniform matrix equals centralized gradient descent") {
  const int n = 4, d = 3;
  const auto obj = make_quadratic(n, d, 8, 1.0, 0.0, 11);
  const double gamma = 0.15;
  auto engine = Engine::create(base_config(Algorithm::Sgp, TopologyKind::DenseUniform, n, 0, gamma), *obj);
  Vector x(d, 0.0);  // centralized reference on f with the same step
  for (long k = 0; k < 60; ++k) {
    engine->step(k);
    add_scaled(x, -gamma, obj->mean_gradient(x));
    for (int i = 0; i < n; ++i) {
      CHECK(test::max_abs_diff(engine->network().node(i).z, x) < 1e-12);
    }
  }
}

TEST_CASE("osgp with tau = 0 is bit-identical to sgp") {
  const auto obj = make_quadratic(8, 4, 8, 0.5, 0.4, 13);
  auto sgp_cfg = base_config(Algorithm::Sgp, TopologyKind::OnePeerExponential, 8, 60, 0.05, 21);
  auto osgp_cfg = sgp_cfg;
  osgp_cfg.algorithm = Algorithm::Osgp;
  osgp_cfg.tau = 0;
  const TrajectoryReport a = run(sgp_cfg, *obj);
  const TrajectoryReport b = run(osgp_cfg, *obj);
  REQUIRE(a.final_z.size() == b.final_z.size());
  for (std::size_t i = 0; i < a.final_z.size(); ++i) CHECK(a.final_z[i] == b.final_z[i]);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t r = 0; r < a.records.size(); ++r) {
    CHECK(a.records[r].f_mean == b.records[r].f_mean);
    CHECK(a.records[r].consensus_err == b.records[r].consensus_err);
  }
}

TEST_CASE("osgp with tau = 1 still averages to the initial mean") {
  std::mt19937_64 rng(17);
  const int n = 8;
  const auto y0 = test::random_vectors(n, 3, rng);
  const QuadraticProblem obj = zero_objective(n, 3);
  auto cfg = base_config(Algorithm::Osgp, TopologyKind::OnePeerExponential, n, 100, 0.1);
  cfg.tau = 1;
  auto engine = Engine::create(cfg, obj, y0);
  for (long k = 0; k < 100; ++k) engine->step(k);
  const Vector mean = test::mean_of(y0);
  for (int i = 0; i < n; ++i) {
    CHECK(test::max_abs_diff(engine->network().node(i).z, mean) < 1e-9);
  }
}

TEST_CASE("osgp with tau = 2 matches the augmented-matrix oracle trajectory") {
  const int n = 4, d = 2, tau = 2;
  const auto obj = make_quadratic(n, d, 5, 0.8, 0.0, 19);
  std::mt19937_64 rng(23);
  const auto y0 = test::random_vectors(n, d, rng);

  auto cfg = base_config(Algorithm::Osgp, TopologyKind::StaticCustom, n, 30, 0.1);
  cfg.static_topology = test::asymmetric_four_node();
  cfg.tau = tau;
  cfg.delay_mode = DelayMode::Fixed;
  auto engine = Engine::create(cfg, *obj, y0);

  // Oracle: global update on the augmented coordinates.
  const MixingMatrix p(test::asymmetric_four_node());
  const DelayAssignment delays = DelayAssignment::fixed(tau);
  const int total = n * (tau + 1);
  Matrix x_aug(d, total);
  Vector w_aug(static_cast<std::size_t>(total), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < d; ++r) x_aug(r, i) = y0[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
    w_aug[static_cast<std::size_t>(i)] = 1.0;
  }
  for (long k = 0; k < 30; ++k) {
    engine->step(k);
    Matrix g_aug(d, total);
    for (int i = 0; i < n; ++i) {
      Vector zi(static_cast<std::size_t>(d));
      for (int r = 0; r < d; ++r) zi[static_cast<std::size_t>(r)] = x_aug(r, i) / w_aug[static_cast<std::size_t>(i)];
      const Vector gi = obj->gradient(i, zi);
      for (int r = 0; r < d; ++r) g_aug(r, i) = gi[static_cast<std::size_t>(r)];
    }
    const AugmentedMatrix aug = augment(p, delays, tau, k);
    matrix_form_step(x_aug, w_aug, g_aug, aug.entries, 0.1);
    for (int i = 0; i < n; ++i) {
      for (int r = 0; r < d; ++r) {
        CHECK(std::abs(x_aug(r, i) - engine->network().node(i).x[static_cast<std::size_t>(r)]) < 1e-10);
      }
      CHECK(std::abs(w_aug[static_cast<std::size_t>(i)] - engine->network().node(i).w) < 1e-10);
    }
  }
}

TEST_CASE("momentum with m = 0 is bit-identical to sgp") {
  const auto obj = make_quadratic(8, 3, 6, 0.4, 0.3, 29);
  auto sgp_cfg = base_config(Algorithm::Sgp, TopologyKind::OnePeerExponential, 8, 50, 0.05, 31);
  auto mom_cfg = sgp_cfg;
  mom_cfg.algorithm = Algorithm::SgpMomentum;
  mom_cfg.momentum = 0.0;
  const TrajectoryReport a = run(sgp_cfg, *obj);
  const TrajectoryReport b = run(mom_cfg, *obj);
  for (std::size_t i = 0; i < a.final_z.size(); ++i) CHECK(a.final_z[i] == b.final_z[i]);
}

TEST_CASE("single-node momentum follows the velocity recursion exactly") {
  const Vector g{2.0, -1.0};
  const LinearObjective obj(1, g);
  const double gamma = 0.1, m = 0.9;
  auto cfg = base_config(Algorithm::SgpMomentum, TopologyKind::DenseUniform, 1, 0, gamma);
  cfg.momentum = m;
  auto engine = Engine::create(cfg, obj);

  Vector x(2, 0.0), u(2, 0.0);
  for (long k = 0; k < 20; ++k) {
    engine->step(k);
    for (std::size_t c = 0; c < 2; ++c) {
      u[c] = m * u[c] + g[c];
      x[c] -= gamma * (m * u[c] + g[c]);
    }
    CHECK(test::max_abs_diff(engine->network().node(0).x, x) == 0.0);
  }
}

TEST_CASE("two momentum steps from zero velocity under a constant gradient") {
  const Vector g{1.5};
  const LinearObjective obj(1, g);
  const double gamma = 0.2, m = 0.5;
  auto cfg = base_config(Algorithm::SgpMomentum, TopologyKind::DenseUniform, 1, 0, gamma);
  cfg.momentum = m;
  auto engine = Engine::create(cfg, obj);

  engine->step(0);
  const double dx1 = gamma * (m * g[0] + g[0]);
  CHECK(engine->network().node(0).x[0] == doctest::Approx(-dx1).epsilon(1e-15));
  engine->step(1);
  const double u2 = m * g[0] + g[0];
  const double dx2 = gamma * (m * u2 + g[0]);
  CHECK(engine->network().node(0).x[0] == doctest::Approx(-dx1 - dx2).epsilon(1e-15));
}

TEST_CASE("dpsgd keeps the push-sum weights pinned at 1") {
  // Symmetric ring: 1/2 self, 1/4 each neighbour.
  const int n = 4;
  Matrix ring(n, n);
  for (int i = 0; i < n; ++i) {
    ring(i, i) = 0.5;
    ring((i + 1) % n, i) = 0.25;
    ring((i + n - 1) % n, i) = 0.25;
  }
  const auto obj = make_quadratic(n, 3, 6, 0.7, 0.2, 37);
  auto cfg = base_config(Algorithm::Dpsgd, TopologyKind::StaticCustom, n, 100, 0.05, 41);
  cfg.static_topology = ring;
  auto engine = Engine::create(cfg, *obj);
  for (long k = 0; k < 100; ++k) {
    engine->step(k);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(engine->network().node(i).w - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("dpsgd rejects asymmetric mixing") {
  const QuadraticProblem obj = zero_objective(4, 2);
  NetworkState net(std::vector<Vector>(4, Vector(2, 0.0)));
  NodeRngs rngs(1, 4);
  CHECK_THROWS_AS(dpsgd_step(net, MixingMatrix(test::asymmetric_four_node()), obj, 0.1, rngs),
                  BaselineError);

  auto cfg = base_config(Algorithm::Dpsgd, TopologyKind::OnePeerExponential, 4, 10, 0.1);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("dpsgd on the bipartite schedule") {
  const auto obj = make_quadratic(8, 2, 5, 0.5, 0.1, 43);
  auto cfg = base_config(Algorithm::Dpsgd, TopologyKind::UndirectedBipartiteExponential, 8, 200, 0.05, 47);
  const TrajectoryReport report = run(cfg, *obj);
  CHECK_FALSE(report.diverged);
  // w stayed at 1 throughout, so z equals x at the end.
  for (int i = 0; i < 8; ++i) {
    CHECK(test::max_abs_diff(report.final_z[static_cast<std::size_t>(i)], report.final_z[0]) < 1.0);
  }
}

TEST_CASE("allreduce matches the direct mean-gradient formula for one step") {
  const int n = 5, d = 3;
  const auto obj = make_quadratic(n, d, 7, 0.6, 0.5, 53);
  const std::uint64_t seed = 59;
  const double gamma = 0.3;
  auto cfg = base_config(Algorithm::AllreduceSgd, TopologyKind::DenseUniform, n, 1, gamma, seed);
  auto engine = Engine::create(cfg, *obj);
  engine->step(0);

  NodeRngs reference(seed, n);
  Vector mean_g(d, 0.0);
  const Vector x0(d, 0.0);
  for (int i = 0; i < n; ++i) {
    add_scaled(mean_g, 1.0, obj->stochastic_gradient(i, x0, reference.stream(i)));
  }
  for (double& v : mean_g) v /= n;
  for (int i = 0; i < n; ++i) {
    CHECK(test::max_abs_diff(engine->network().node(i).x, scaled(mean_g, -gamma)) == 0.0);
  }
}

TEST_CASE("sgp on dense uniform from a common init equals allreduce per step") {
  const int n = 6, d = 4;
  const auto obj = make_quadratic(n, d, 8, 0.8, 0.6, 61);
  auto sgp_cfg = base_config(Algorithm::Sgp, TopologyKind::DenseUniform, n, 0, 0.1, 67);
  auto ar_cfg = sgp_cfg;
  ar_cfg.algorithm = Algorithm::AllreduceSgd;
  auto a = Engine::create(sgp_cfg, *obj);
  auto b = Engine::create(ar_cfg, *obj);
  for (long k = 0; k < 80; ++k) {
    a->step(k);
    b->step(k);
    for (int i = 0; i < n; ++i) {
      CHECK(test::max_abs_diff(a->network().node(i).z, b->network().node(i).x) < 1e-12);
    }
  }
}

TEST_CASE("biased variant converges to the pi-weighted sum, not the mean") {
  const Matrix p = test::asymmetric_four_node();
  std::vector<Vector> y0(4, Vector(1, 0.0));
  y0[0][0] = 1.0;  // one-hot
  const QuadraticProblem obj = zero_objective(4, 1);

  auto cfg = base_config(Algorithm::BiasedOsgp, TopologyKind::StaticCustom, 4, 300, 0.1);
  cfg.static_topology = p;
  cfg.tau = 0;
  auto engine = Engine::create(cfg, obj, y0);
  for (long k = 0; k < 300; ++k) engine->step(k);

  const Vector pi = test::power_iteration_pi(p);
  double worst_vs_mean = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double xi = engine->network().node(i).x[0];
    CHECK(xi == doctest::Approx(pi[static_cast<std::size_t>(i)]).epsilon(1e-8));
    worst_vs_mean = std::max(worst_vs_mean, std::abs(xi - 0.25));
  }
  CHECK(worst_vs_mean > 0.05);
}

TEST_CASE("biased variant equals dpsgd on a symmetric schedule") {
  const auto obj = make_quadratic(8, 3, 6, 0.5, 0.0, 71);
  auto biased_cfg = base_config(Algorithm::BiasedOsgp, TopologyKind::UndirectedBipartiteExponential, 8, 0, 0.08, 73);
  biased_cfg.tau = 0;
  auto dpsgd_cfg = biased_cfg;
  dpsgd_cfg.algorithm = Algorithm::Dpsgd;
  auto a = Engine::create(biased_cfg, *obj);
  auto b = Engine::create(dpsgd_cfg, *obj);
  for (long k = 0; k < 60; ++k) {
    a->step(k);
    b->step(k);
    for (int i = 0; i < 8; ++i) {
      CHECK(test::max_abs_diff(a->network().node(i).z, b->network().node(i).z) < 1e-12);
    }
  }
}

TEST_CASE("run with zero iterations reports only the initial row") {
  const auto obj = make_quadratic(8, 2, 5, 0.0, 0.0, 79);
  const TrajectoryReport report = run(base_config(Algorithm::Sgp, TopologyKind::OnePeerExponential, 8, 0, 0.1), *obj);
  CHECK(report.records.size() == 1);
  CHECK(report.records.front().iteration == 0);
}

TEST_CASE("noiseless strongly convex quadratic converges to the minimizer") {
  const int n = 8, d = 10;
  const auto obj = make_quadratic(n, d, 20, 0.0, 0.0, 83);
  auto cfg = base_config(Algorithm::Sgp, TopologyKind::OnePeerExponential, n, 3000, 0.1, 89);
  const TrajectoryReport report = run(cfg, *obj);
  const Vector& xstar = *obj->minimizer();
  for (const auto& z : report.final_z) CHECK(norm2(diff(z, xstar)) < 1e-6);
}

TEST_CASE("osgp tau=1 and sgp both reach stationarity on the noiseless quadratic") {
  const int n = 8, d = 6;
  const auto obj = make_quadratic(n, d, 12, 0.0, 0.0, 97);
  auto sgp_cfg = base_config(Algorithm::Sgp, TopologyKind::OnePeerExponential, n, 3000, 0.1, 101);
  auto osgp_cfg = sgp_cfg;
  osgp_cfg.algorithm = Algorithm::Osgp;
  osgp_cfg.tau = 1;
  const TrajectoryReport a = run(sgp_cfg, *obj);
  const TrajectoryReport b = run(osgp_cfg, *obj);
  CHECK(a.records.back().grad_norm_sq < 1e-10);
  CHECK(b.records.back().grad_norm_sq < 1e-10);
  // Same seed, different trajectories (delayed communication).
  CHECK(a.records[1].consensus_err != b.records[1].consensus_err);
}

TEST_CASE("steady-state consensus distance is proportional to the step size") {
  const int n = 8;
  const auto obj = make_quadratic(n, 4, 8, 1.0, 0.0, 103);
  auto cfg1 = base_config(Algorithm::Sgp, TopologyKind::OnePeerExponential, n, 4000, 0.02, 107);
  auto cfg2 = cfg1;
  cfg2.gamma = 0.01;
  const TrajectoryReport r1 = run(cfg1, *obj);
  const TrajectoryReport r2 = run(cfg2, *obj);
  auto steady_rms = [](const TrajectoryReport& r) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 3 * r.records.size() / 4; i < r.records.size(); ++i) {
      sum += r.records[i].consensus_err;
      ++count;
    }
    return std::sqrt(sum / count);
  };
  const double ratio = steady_rms(r2) / steady_rms(r1);
  CHECK(ratio > 0.35);
  CHECK(ratio < 0.65);
}

TEST_CASE("gradients are evaluated at the de-biased point") {
  const ProbeObjective obj(2, 2);
  // w != 1 so x and z differ: scale node states before stepping.
  NetworkState net({{1.0, 2.0}, {3.0, 4.0}});
  net.node(0).x = {2.0, 4.0};
  net.node(0).w = 2.0;
  net.refresh_debiased();
  NodeRngs rngs(1, 2);
  sgp_step(net, dense_uniform(2), obj, 0.1, rngs);
  REQUIRE(obj.eval_points.size() == 2);
  CHECK(obj.eval_points[0] == Vector{1.0, 2.0});  // z, not x
  CHECK(obj.eval_points[1] == Vector{3.0, 4.0});
}

TEST_CASE("de-bias homogeneity") {
  const Vector x{0.5, -2.0, 7.0};
  for (double c : {0.5, 2.0, 13.0}) {
    CHECK(debias(scaled(x, c), c) == debias(x, 1.0));
  }
}

TEST_CASE("step-decay milestones scale the step size") {
  auto cfg = base_config(Algorithm::Sgp, TopologyKind::DenseUniform, 1, 10, 0.4);
  cfg.lr_decay = {{4, 0.5}, {8, 0.1}};
  CHECK(cfg.gamma_at(0) == doctest::Approx(0.4));
  CHECK(cfg.gamma_at(3) == doctest::Approx(0.4));
  CHECK(cfg.gamma_at(4) == doctest::Approx(0.2));
  CHECK(cfg.gamma_at(9) == doctest::Approx(0.02));

  // Default step size rule when gamma is unset.
  AlgorithmConfig defaulted;
  defaulted.nodes = 8;
  defaulted.iters = 200;
  CHECK(defaulted.resolved_gamma() == doctest::Approx(std::sqrt(8.0 / 200.0)));
}

TEST_CASE("sparse cadence overlap still mixes to the mean") {
  std::mt19937_64 rng(109);
  const int n = 4;
  const auto y0 = test::random_vectors(n, 2, rng);
  const QuadraticProblem obj = zero_objective(n, 2);
  auto cfg = base_config(Algorithm::Osgp, TopologyKind::OnePeerExponential, n, 400, 0.1);
  cfg.tau = 2;
  cfg.cadence = OsgpCadence::EveryTau;
  auto engine = Engine::create(cfg, obj, y0);
  for (long k = 0; k < 400; ++k) engine->step(k);
  const Vector mean = test::mean_of(y0);
  for (int i = 0; i < n; ++i) {
    CHECK(test::max_abs_diff(engine->network().node(i).z, mean) < 1e-6);
  }
}
