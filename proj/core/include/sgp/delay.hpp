#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sgp/linalg.hpp"
#include "sgp/pushsum.hpp"
#include "sgp/topology.hpp"

namespace sgp {

/// Per-(edge, iteration) message delay in [0, tau]. The delay is decided at
/// send time and never changes in flight; it is a pure function of
/// (receiver, sender, iteration) so the buffer runtime and the augmented
/// matrix oracle always see the same assignment. Self contributions are
/// never delayed.
class DelayAssignment {
public:
  using DelayFn = std::function<int(int receiver, int sender, long iteration)>;

  static DelayAssignment none();
  static DelayAssignment fixed(int tau);
  static DelayAssignment uniform(int tau, std::uint64_t seed);
  /// Arbitrary per-edge assignment, e.g. a single delayed edge.
  static DelayAssignment custom(DelayFn fn, int tau);

  int tau() const { return tau_; }
  int delay(int receiver, int sender, long iteration) const;

private:
  enum class Mode { None, Fixed, Uniform, Custom };
  DelayAssignment(Mode mode, int tau, std::uint64_t seed);
  Mode mode_;
  int tau_;
  std::uint64_t seed_;
  DelayFn fn_;
};

/// Pre-weighted message (p_{j,i} x_i, p_{j,i} w_i) in transit from sender i
/// to receiver j.
struct InTransitMessage {
  Vector payload_x;
  double payload_w = 0.0;
  int sender = 0;
  int receiver = 0;
  long sent_at = 0;
  long deliver_at = 0;
};

class MessageBuffer {
public:
  void push(InTransitMessage msg);
  /// Removes and returns all messages due exactly at `iteration`, sorted by
  /// (sender, sent_at). Throws ProtocolError if an overdue message exists.
  std::vector<InTransitMessage> take_due(long iteration);

  bool empty() const { return messages_.empty(); }
  std::size_t size() const { return messages_.size(); }
  const std::vector<InTransitMessage>& messages() const { return messages_; }
  /// Total push-sum weight currently in flight.
  double total_weight() const;
  /// Sum of the in-flight pre-weighted payload vectors.
  Vector total_payload_x(int dim) const;

private:
  std::vector<InTransitMessage> messages_;
};

/// Column-stochastic matrix over n(tau+1) coordinates: the n real nodes
/// followed by tau banks of virtual nodes holding messages that are r
/// iterations from delivery. Block (r, 0) routes a delay-r edge weight to the
/// depth-r virtual node of its receiver; super-diagonal identity blocks shift
/// each virtual chain one step closer to delivery.
struct AugmentedMatrix {
  int n = 0;
  int tau = 0;
  Matrix entries;

  int size() const { return n * (tau + 1); }
};

/// Builds the augmented matrix for iteration k. Throws DelayBoundError when
/// the assignment produces a delay above tau.
AugmentedMatrix augment(const MixingMatrix& p, const DelayAssignment& delays, int tau, long k);

/// One PushSum exchange with per-edge delays: the self contribution
/// p_{i,i} x_i is applied immediately, off-diagonal contributions are
/// enqueued with delivery at k + delay, and all messages due at the current
/// iteration are accumulated into their receivers. Equivalent, on the real
/// coordinates, to matrix_form_step with augment(p, delays, tau, k) where
/// virtual nodes start at x = 0, w = 0.
void step_with_delays(NetworkState& net, MessageBuffer& buffer, const MixingMatrix& p,
                      const DelayAssignment& delays);

}  // namespace sgp
