#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgp/delay.hpp"
#include "sgp/metrics.hpp"
#include "sgp/objectives.hpp"
#include "sgp/pushsum.hpp"
#include "sgp/rng.hpp"
#include "sgp/topology.hpp"

namespace sgp {

enum class Algorithm { Sgp, Osgp, SgpMomentum, Dpsgd, AllreduceSgd, BiasedOsgp };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

/// Send cadence for the overlap engine: transmit every iteration with
/// delivery delayed by tau, or transmit only every tau-th iteration.
enum class OsgpCadence { EveryIteration, EveryTau };

enum class DelayMode { None, Fixed, Uniform };

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::Sgp;
  TopologyKind topology = TopologyKind::OnePeerExponential;
  int nodes = 1;
  long iters = 0;
  /// Unset gamma resolves to sqrt(nodes / iters).
  std::optional<double> gamma;
  double momentum = 0.0;
  int tau = 0;
  OsgpCadence cadence = OsgpCadence::EveryIteration;
  DelayMode delay_mode = DelayMode::Fixed;
  std::uint64_t seed = 0;
  long record_every = 1;
  /// Step-decay milestones: at iteration k the step size is multiplied by
  /// every factor whose milestone is <= k.
  std::vector<std::pair<long, double>> lr_decay;
  std::optional<Matrix> static_topology;

  double resolved_gamma() const;
  double gamma_at(long k) const;
  MixingSchedule make_schedule() const;
  DelayAssignment make_delays() const;
  void validate() const;
};

/// A point-to-point message incorporated by `receiver` during the current
/// iteration; `sent_at` is the iteration whose compute phase produced it.
struct Delivery {
  int receiver = 0;
  int sender = 0;
  long sent_at = 0;
};

/// One local SGD update interleaved with one PushSum step; gradients are
/// evaluated at the de-biased z_i and applied to the biased x_i.
void sgp_step(NetworkState& net, const MixingMatrix& p, const Objective& obj, double gamma,
              NodeRngs& rngs);

/// Heavy-ball-on-top-of-lookahead variant: u <- m u + g, x <- x - gamma (m u + g).
/// The velocity buffer is node-local and never gossiped. With momentum = 0
/// this is exactly sgp_step.
void sgp_momentum_step(NetworkState& net, const MixingMatrix& p, const Objective& obj,
                       double gamma, double momentum, std::vector<Vector>& velocity,
                       NodeRngs& rngs);

/// sgp_step restricted to symmetric doubly-stochastic mixing; verifies the
/// push-sum weights stay at 1. Throws BaselineError otherwise.
void dpsgd_step(NetworkState& net, const MixingMatrix& p, const Objective& obj, double gamma,
                NodeRngs& rngs);

/// Exact-averaging baseline: x <- x - gamma * (1/n) sum_j grad_j; all nodes
/// stay identical.
void allreduce_sgd_step(NetworkState& net, const Objective& obj, double gamma, NodeRngs& rngs);

/// One overlap iteration: local gradient step, non-blocking sends with
/// per-edge delivery delays, immediate self contribution, and accumulation of
/// every message due this iteration. With `biased` the push-sum weight is
/// pinned to 1 (never mixed) and z is just x.
void osgp_step(NetworkState& net, MessageBuffer& buffer, const MixingMatrix& p,
               const Objective& obj, double gamma, const DelayAssignment& delays, int tau,
               OsgpCadence cadence, bool biased, NodeRngs& rngs,
               std::vector<Delivery>* delivered = nullptr);

/// Stateful driver for one algorithm run; the simulator steps it and reads
/// the per-iteration deliveries for its cost model.
class Engine {
public:
  static std::unique_ptr<Engine> create(const AlgorithmConfig& config, const Objective& obj,
                                        std::optional<std::vector<Vector>> init = std::nullopt);
  virtual ~Engine() = default;
  virtual void step(long k) = 0;
  virtual NetworkState& network() = 0;
  const NetworkState& network() const { return const_cast<Engine*>(this)->network(); }
  virtual const std::vector<Delivery>& last_deliveries() const = 0;
  /// True for algorithms whose iteration is a network-wide collective.
  virtual bool synchronizes_all() const { return false; }
  /// Sum of parameter mass currently in transit (sent, not yet received).
  /// Zero for blocking algorithms; the overlap engines report their buffer.
  virtual Vector in_transit_x() const;
  /// Node-wise average including in-transit mass, (1/n)(sum_i x_i + in-flight).
  Vector mean_x_with_in_transit() const;
};

/// Runs `config.iters` steps with metrics recorded every record_every
/// iterations (plus the initial and final rows); no communication cost model,
/// so sim_time is 0 throughout. Deterministic given config.seed.
TrajectoryReport run(const AlgorithmConfig& config, const Objective& obj,
                     std::optional<std::vector<Vector>> init = std::nullopt);

}  // namespace sgp
