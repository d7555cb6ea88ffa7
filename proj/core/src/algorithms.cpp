#include "sgp/algorithms.hpp"

#include <cmath>

#include "sgp/error.hpp"
#include "sgp/simulator.hpp"

namespace sgp {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Sgp: return "sgp";
    case Algorithm::Osgp: return "osgp";
    case Algorithm::SgpMomentum: return "sgp_momentum";
    case Algorithm::Dpsgd: return "dpsgd";
    case Algorithm::AllreduceSgd: return "allreduce_sgd";
    case Algorithm::BiasedOsgp: return "biased_osgp";
  }
  throw ConfigError("to_string: unknown algorithm");
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "sgp") return Algorithm::Sgp;
  if (name == "osgp") return Algorithm::Osgp;
  if (name == "sgp_momentum") return Algorithm::SgpMomentum;
  if (name == "dpsgd") return Algorithm::Dpsgd;
  if (name == "allreduce_sgd") return Algorithm::AllreduceSgd;
  if (name == "biased_osgp") return Algorithm::BiasedOsgp;
  throw ConfigError("unknown algorithm '" + name + "'");
}

double AlgorithmConfig::resolved_gamma() const {
  if (gamma) return *gamma;
  if (iters <= 0) return 1.0;
  return std::sqrt(static_cast<double>(nodes) / static_cast<double>(iters));
}

double AlgorithmConfig::gamma_at(long k) const {
  double g = resolved_gamma();
  for (const auto& [milestone, factor] : lr_decay) {
    if (milestone <= k) g *= factor;
  }
  return g;
}

MixingSchedule AlgorithmConfig::make_schedule() const {
  if (topology == TopologyKind::StaticCustom) {
    if (!static_topology) throw ConfigError("static topology requested but no matrix given");
    return MixingSchedule::static_custom(*static_topology);
  }
  return MixingSchedule(topology, nodes);
}

DelayAssignment AlgorithmConfig::make_delays() const {
  switch (delay_mode) {
    case DelayMode::None: return DelayAssignment::none();
    case DelayMode::Fixed: return DelayAssignment::fixed(tau);
    case DelayMode::Uniform: return DelayAssignment::uniform(tau, mix64(seed, 0xDE1A7ull));
  }
  throw ConfigError("unknown delay mode");
}

void AlgorithmConfig::validate() const {
  if (nodes < 1) throw ConfigError("nodes must be >= 1");
  if (iters < 0) throw ConfigError("iters must be >= 0");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (gamma && *gamma <= 0.0) throw ConfigError("gamma must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0, 1)");
  if (tau < 0) throw ConfigError("tau must be >= 0");
  for (const auto& [milestone, factor] : lr_decay) {
    if (milestone < 0 || factor <= 0.0) throw ConfigError("invalid lr_decay milestone");
  }
  if (algorithm != Algorithm::AllreduceSgd) {
    const MixingSchedule schedule = make_schedule();  // validates topology vs nodes
    if (topology == TopologyKind::StaticCustom && schedule.size() != nodes) {
      throw ConfigError("static topology size does not match node count");
    }
    if (algorithm == Algorithm::Dpsgd) {
      for (int k = 0; k < schedule.period(); ++k) {
        const MixingMatrix p = schedule.matrix(k);
        if (!p.symmetric() || !p.doubly_stochastic()) {
          throw ConfigError("dpsgd requires a symmetric doubly-stochastic schedule");
        }
      }
    }
  }
}

void sgp_momentum_step(NetworkState& net, const MixingMatrix& p, const Objective& obj,
                       double gamma, double momentum, std::vector<Vector>& velocity,
                       NodeRngs& rngs) {
  const int n = net.size();
  if (momentum != 0.0 && static_cast<int>(velocity.size()) != n) {
    throw ShapeError("sgp_momentum_step: velocity buffer count != node count");
  }
  for (int i = 0; i < n; ++i) {
    NodeState& s = net.node(i);
    const Vector g = obj.stochastic_gradient(i, s.z, rngs.stream(i));
    if (momentum != 0.0) {
      Vector& u = velocity[static_cast<std::size_t>(i)];
      for (std::size_t c = 0; c < g.size(); ++c) {
        u[c] = momentum * u[c] + g[c];
        s.x[c] -= gamma * (momentum * u[c] + g[c]);
      }
    } else {
      add_scaled(s.x, -gamma, g);
    }
  }
  gossip_step(net, p);
}

void sgp_step(NetworkState& net, const MixingMatrix& p, const Objective& obj, double gamma,
              NodeRngs& rngs) {
  std::vector<Vector> no_velocity;
  sgp_momentum_step(net, p, obj, gamma, 0.0, no_velocity, rngs);
}

void dpsgd_step(NetworkState& net, const MixingMatrix& p, const Objective& obj, double gamma,
                NodeRngs& rngs) {
  if (!p.symmetric() || !p.doubly_stochastic()) {
    throw BaselineError("dpsgd_step: mixing matrix must be symmetric doubly-stochastic");
  }
  sgp_step(net, p, obj, gamma, rngs);
  for (int i = 0; i < net.size(); ++i) {
    if (std::abs(net.node(i).w - 1.0) > 1e-12) {
      throw BaselineError("dpsgd_step: push-sum weight drifted from 1");
    }
  }
}

void allreduce_sgd_step(NetworkState& net, const Objective& obj, double gamma, NodeRngs& rngs) {
  const int n = net.size();
  Vector mean_g(static_cast<std::size_t>(net.dim()), 0.0);
  for (int i = 0; i < n; ++i) {
    add_scaled(mean_g, 1.0, obj.stochastic_gradient(i, net.node(i).x, rngs.stream(i)));
  }
  for (double& v : mean_g) v /= static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    NodeState& s = net.node(i);
    add_scaled(s.x, -gamma, mean_g);
    s.z = s.x;
  }
  net.advance_iteration();
}

void osgp_step(NetworkState& net, MessageBuffer& buffer, const MixingMatrix& p,
               const Objective& obj, double gamma, const DelayAssignment& delays, int tau,
               OsgpCadence cadence, bool biased, NodeRngs& rngs,
               std::vector<Delivery>* delivered) {
  const int n = net.size();
  if (p.size() != n) throw ShapeError("osgp_step: mixing matrix size != node count");
  const long k = net.iteration();

  for (int i = 0; i < n; ++i) {
    NodeState& s = net.node(i);
    const Vector g = obj.stochastic_gradient(i, s.z, rngs.stream(i));
    add_scaled(s.x, -gamma, g);
  }

  const bool send = cadence == OsgpCadence::EveryIteration || tau == 0 || (k % tau == 0);
  if (send) {
    for (int i = 0; i < n; ++i) {
      NodeState& s = net.node(i);
      for (int j = 0; j < n; ++j) {
        const double pji = p.weight(j, i);
        if (j == i || pji == 0.0) continue;
        const int delay = delays.delay(j, i, k);
        if (delay > tau) throw DelayBoundError("osgp_step: delay exceeds tau");
        InTransitMessage msg;
        msg.payload_x = scaled(s.x, pji);
        msg.payload_w = pji * s.w;
        msg.sender = i;
        msg.receiver = j;
        msg.sent_at = k;
        msg.deliver_at = k + delay;
        buffer.push(std::move(msg));
      }
      const double pii = p.weight(i, i);
      for (double& v : s.x) v *= pii;
      if (!biased) s.w *= pii;
    }
  }

  for (const auto& msg : buffer.take_due(k)) {
    NodeState& s = net.node(msg.receiver);
    add_scaled(s.x, 1.0, msg.payload_x);
    if (!biased) s.w += msg.payload_w;
    if (delivered) delivered->push_back({msg.receiver, msg.sender, msg.sent_at});
  }

  for (int i = 0; i < n; ++i) {
    NodeState& s = net.node(i);
    s.z = biased ? s.x : debias(s.x, s.w);
  }
  net.advance_iteration();
}

namespace {

std::vector<Vector> default_init(const AlgorithmConfig& config, const Objective& obj,
                                 std::optional<std::vector<Vector>>&& init) {
  if (init) {
    if (static_cast<int>(init->size()) != config.nodes) {
      throw ShapeError("engine init: node count mismatch");
    }
    return std::move(*init);
  }
  return std::vector<Vector>(static_cast<std::size_t>(config.nodes),
                             Vector(static_cast<std::size_t>(obj.dim()), 0.0));
}

class SgpFamilyEngine : public Engine {
public:
  SgpFamilyEngine(const AlgorithmConfig& config, const Objective& obj,
                  std::optional<std::vector<Vector>> init, double momentum, bool dpsgd)
      : config_(config),
        obj_(obj),
        schedule_(config.make_schedule()),
        net_(default_init(config, obj, std::move(init))),
        rngs_(config.seed, config.nodes),
        momentum_(momentum),
        dpsgd_(dpsgd) {
    if (momentum_ != 0.0) {
      velocity_.assign(static_cast<std::size_t>(config.nodes),
                       Vector(static_cast<std::size_t>(obj.dim()), 0.0));
    }
  }

  void step(long k) override {
    const MixingMatrix p = schedule_.matrix(k);
    deliveries_.clear();
    for (int i = 0; i < p.size(); ++i) {
      for (int j = 0; j < p.size(); ++j) {
        if (j != i && p.weight(j, i) > 0.0) deliveries_.push_back({j, i, k});
      }
    }
    const double gamma = config_.gamma_at(k);
    if (dpsgd_) {
      dpsgd_step(net_, p, obj_, gamma, rngs_);
    } else {
      sgp_momentum_step(net_, p, obj_, gamma, momentum_, velocity_, rngs_);
    }
  }

  NetworkState& network() override { return net_; }
  const std::vector<Delivery>& last_deliveries() const override { return deliveries_; }

private:
  AlgorithmConfig config_;
  const Objective& obj_;
  MixingSchedule schedule_;
  NetworkState net_;
  NodeRngs rngs_;
  double momentum_;
  bool dpsgd_;
  std::vector<Vector> velocity_;
  std::vector<Delivery> deliveries_;
};

class OsgpEngine : public Engine {
public:
  OsgpEngine(const AlgorithmConfig& config, const Objective& obj,
             std::optional<std::vector<Vector>> init, bool biased)
      : config_(config),
        obj_(obj),
        schedule_(config.make_schedule()),
        delays_(config.make_delays()),
        net_(default_init(config, obj, std::move(init))),
        rngs_(config.seed, config.nodes),
        biased_(biased) {}

  void step(long k) override {
    deliveries_.clear();
    osgp_step(net_, buffer_, schedule_.matrix(k), obj_, config_.gamma_at(k), delays_, config_.tau,
              config_.cadence, biased_, rngs_, &deliveries_);
  }

  NetworkState& network() override { return net_; }
  const std::vector<Delivery>& last_deliveries() const override { return deliveries_; }
  Vector in_transit_x() const override { return buffer_.total_payload_x(net_.dim()); }

private:
  AlgorithmConfig config_;
  const Objective& obj_;
  MixingSchedule schedule_;
  DelayAssignment delays_;
  NetworkState net_;
  NodeRngs rngs_;
  bool biased_;
  MessageBuffer buffer_;
  std::vector<Delivery> deliveries_;
};

class AllReduceEngine : public Engine {
public:
  AllReduceEngine(const AlgorithmConfig& config, const Objective& obj,
                  std::optional<std::vector<Vector>> init)
      : config_(config),
        obj_(obj),
        net_(default_init(config, obj, std::move(init))),
        rngs_(config.seed, config.nodes) {
    for (int i = 1; i < net_.size(); ++i) {
      if (net_.node(i).x != net_.node(0).x) {
        throw ConfigError("allreduce_sgd requires identical initial parameters");
      }
    }
  }

  void step(long k) override { allreduce_sgd_step(net_, obj_, config_.gamma_at(k), rngs_); }

  NetworkState& network() override { return net_; }
  const std::vector<Delivery>& last_deliveries() const override { return deliveries_; }
  bool synchronizes_all() const override { return true; }

private:
  AlgorithmConfig config_;
  const Objective& obj_;
  NetworkState net_;
  NodeRngs rngs_;
  std::vector<Delivery> deliveries_;
};

}  // namespace

Vector Engine::in_transit_x() const {
  return Vector(static_cast<std::size_t>(network().dim()), 0.0);
}

Vector Engine::mean_x_with_in_transit() const {
  const NetworkState& net = network();
  Vector sum = in_transit_x();
  for (int i = 0; i < net.size(); ++i) add_scaled(sum, 1.0, net.node(i).x);
  for (double& v : sum) v /= static_cast<double>(net.size());
  return sum;
}

std::unique_ptr<Engine> Engine::create(const AlgorithmConfig& config, const Objective& obj,
                                       std::optional<std::vector<Vector>> init) {
  config.validate();
  if (obj.nodes() != config.nodes) throw ConfigError("objective node count != config nodes");
  switch (config.algorithm) {
    case Algorithm::Sgp:
      return std::make_unique<SgpFamilyEngine>(config, obj, std::move(init), 0.0, false);
    case Algorithm::SgpMomentum:
      return std::make_unique<SgpFamilyEngine>(config, obj, std::move(init), config.momentum,
                                               false);
    case Algorithm::Dpsgd:
      return std::make_unique<SgpFamilyEngine>(config, obj, std::move(init), 0.0, true);
    case Algorithm::Osgp:
      if (config.tau == 0) {
        // tau = 0 overlap is plain SGP; share the exact code path.
        return std::make_unique<SgpFamilyEngine>(config, obj, std::move(init), 0.0, false);
      }
      return std::make_unique<OsgpEngine>(config, obj, std::move(init), false);
    case Algorithm::BiasedOsgp:
      return std::make_unique<OsgpEngine>(config, obj, std::move(init), true);
    case Algorithm::AllreduceSgd:
      return std::make_unique<AllReduceEngine>(config, obj, std::move(init));
  }
  throw ConfigError("unknown algorithm");
}

TrajectoryReport run(const AlgorithmConfig& config, const Objective& obj,
                     std::optional<std::vector<Vector>> init) {
  SimulationConfig sim;
  sim.algorithm = config;
  sim.cost.compute_time = 0.0;
  return simulate(sim, obj, std::move(init));
}

}  // namespace sgp
