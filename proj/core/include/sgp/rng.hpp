#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sgp {

/// splitmix64 mixing step; used to derive independent stream seeds and for
/// stateless, order-independent random draws keyed by (seed, indices).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(mix64(a) ^ b); }

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(mix64(a, b) ^ c);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  return mix64(mix64(a, b, c) ^ d);
}

/// Uniform draw in [0, 1) from a stateless hash; stable across call order.
inline double hash_uniform(std::uint64_t key) {
  return static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
}

/// One independent mt19937_64 stream per node, seeded by (seed, node id), so
/// gradient sampling is reproducible regardless of node evaluation order.
class NodeRngs {
public:
  NodeRngs(std::uint64_t seed, int nodes) {
    streams_.reserve(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
      streams_.emplace_back(mix64(seed, static_cast<std::uint64_t>(i)));
    }
  }

  std::mt19937_64& stream(int node) { return streams_[static_cast<std::size_t>(node)]; }
  int size() const { return static_cast<int>(streams_.size()); }

private:
  std::vector<std::mt19937_64> streams_;
};

}  // namespace sgp
