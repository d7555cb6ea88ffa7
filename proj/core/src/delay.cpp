#include "sgp/delay.hpp"

#include <algorithm>

#include "sgp/error.hpp"
#include "sgp/rng.hpp"

namespace sgp {

DelayAssignment::DelayAssignment(Mode mode, int tau, std::uint64_t seed)
    : mode_(mode), tau_(tau), seed_(seed) {
  if (tau < 0) throw ConfigError("DelayAssignment: tau must be >= 0");
}

DelayAssignment DelayAssignment::none() { return DelayAssignment(Mode::None, 0, 0); }

DelayAssignment DelayAssignment::fixed(int tau) { return DelayAssignment(Mode::Fixed, tau, 0); }

DelayAssignment DelayAssignment::uniform(int tau, std::uint64_t seed) {
  return DelayAssignment(Mode::Uniform, tau, seed);
}

DelayAssignment DelayAssignment::custom(DelayFn fn, int tau) {
  DelayAssignment d(Mode::Custom, tau, 0);
  d.fn_ = std::move(fn);
  return d;
}

int DelayAssignment::delay(int receiver, int sender, long iteration) const {
  if (receiver == sender) return 0;
  switch (mode_) {
    case Mode::None: return 0;
    case Mode::Fixed: return tau_;
    case Mode::Uniform: {
      const std::uint64_t key = mix64(seed_, static_cast<std::uint64_t>(receiver),
                                      static_cast<std::uint64_t>(sender),
                                      static_cast<std::uint64_t>(iteration));
      return static_cast<int>(mix64(key) % static_cast<std::uint64_t>(tau_ + 1));
    }
    case Mode::Custom: return fn_(receiver, sender, iteration);
  }
  return 0;
}

void MessageBuffer::push(InTransitMessage msg) { messages_.push_back(std::move(msg)); }

std::vector<InTransitMessage> MessageBuffer::take_due(long iteration) {
  for (const auto& m : messages_) {
    if (m.deliver_at < iteration) {
      throw ProtocolError("MessageBuffer: missed delivery (message overdue)");
    }
  }
  std::vector<InTransitMessage> due;
  auto keep = messages_.begin();
  for (auto it = messages_.begin(); it != messages_.end(); ++it) {
    if (it->deliver_at == iteration) {
      due.push_back(std::move(*it));
    } else {
      if (keep != it) *keep = std::move(*it);
      ++keep;
    }
  }
  messages_.erase(keep, messages_.end());
  std::sort(due.begin(), due.end(), [](const InTransitMessage& a, const InTransitMessage& b) {
    if (a.sender != b.sender) return a.sender < b.sender;
    return a.sent_at < b.sent_at;
  });
  return due;
}

double MessageBuffer::total_weight() const {
  double sum = 0.0;
  for (const auto& m : messages_) sum += m.payload_w;
  return sum;
}

Vector MessageBuffer::total_payload_x(int dim) const {
  Vector sum(static_cast<std::size_t>(dim), 0.0);
  for (const auto& m : messages_) add_scaled(sum, 1.0, m.payload_x);
  return sum;
}

AugmentedMatrix augment(const MixingMatrix& p, const DelayAssignment& delays, int tau, long k) {
  if (tau < 0) throw ConfigError("augment: tau must be >= 0");
  const int n = p.size();
  AugmentedMatrix aug;
  aug.n = n;
  aug.tau = tau;
  aug.entries = Matrix(n * (tau + 1), n * (tau + 1));
  // Virtual chains always forward: block (r, r+1) is the identity.
  for (int r = 0; r < tau; ++r) {
    for (int j = 0; j < n; ++j) aug.entries(r * n + j, (r + 1) * n + j) = 1.0;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double w = p.weight(j, i);
      if (w == 0.0) continue;
      const int r = delays.delay(j, i, k);
      if (r > tau) throw DelayBoundError("augment: delay exceeds tau");
      aug.entries(r * n + j, i) = w;
    }
  }
  return aug;
}

void step_with_delays(NetworkState& net, MessageBuffer& buffer, const MixingMatrix& p,
                      const DelayAssignment& delays) {
  const int n = net.size();
  if (p.size() != n) throw ShapeError("step_with_delays: mixing matrix size != node count");
  const long k = net.iteration();

  std::vector<Vector> new_x;
  new_x.reserve(static_cast<std::size_t>(n));
  Vector new_w(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const NodeState& s = net.node(i);
    for (int j = 0; j < n; ++j) {
      const double pji = p.weight(j, i);
      if (j == i || pji == 0.0) continue;
      InTransitMessage msg;
      msg.payload_x = scaled(s.x, pji);
      msg.payload_w = pji * s.w;
      msg.sender = i;
      msg.receiver = j;
      msg.sent_at = k;
      msg.deliver_at = k + delays.delay(j, i, k);
      buffer.push(std::move(msg));
    }
    new_x.push_back(scaled(s.x, p.weight(i, i)));
    new_w[static_cast<std::size_t>(i)] = p.weight(i, i) * s.w;
  }

  for (const auto& msg : buffer.take_due(k)) {
    add_scaled(new_x[static_cast<std::size_t>(msg.receiver)], 1.0, msg.payload_x);
    new_w[static_cast<std::size_t>(msg.receiver)] += msg.payload_w;
  }

  for (int i = 0; i < n; ++i) {
    net.node(i).x = std::move(new_x[static_cast<std::size_t>(i)]);
    net.node(i).w = new_w[static_cast<std::size_t>(i)];
  }
  net.refresh_debiased();
  net.advance_iteration();
}

}  // namespace sgp
