#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "ktlab/types.hpp"

namespace ktlab {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent seed from a base seed and a list of labels.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t s = mix64(base);
  for (std::uint64_t l : labels) s = mix64(s ^ mix64(l + 0x632be59bd9b4e019ULL));
  return s;
}

/// Stream labels used to split the global seed.
enum class Stream : std::uint64_t {
  Graph = 1,
  Ports = 2,
  Phase1 = 11,
  Phase2 = 12,
  Merge = 13,
  Leader = 14,
  Sketch = 15,
  Mst = 16,
  Engine = 17,
};

/// Private random stream for one node; depends only on (seed, stream, node, salt)
/// so results do not depend on iteration order.
inline std::mt19937_64 node_rng(std::uint64_t seed, Stream stream, NodeId node, std::uint64_t salt = 0) {
  return std::mt19937_64(derive_seed(seed, {static_cast<std::uint64_t>(stream), node.word(), salt}));
}

/// Bernoulli(p) draw; p >= 1 always succeeds, p <= 0 never does.
inline bool bernoulli(std::mt19937_64& rng, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

/// Publicly shared random bits (packed little-endian into 64-bit words).
/// Deterministic per seed; models random bits broadcast to every node.
std::vector<std::uint64_t> shared_randomness(std::uint64_t seed, std::size_t bits);

}  // namespace ktlab
