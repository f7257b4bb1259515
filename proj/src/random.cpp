#include "ktlab/random.hpp"

namespace ktlab {

std::vector<std::uint64_t> shared_randomness(std::uint64_t seed, std::size_t bits) {
  std::vector<std::uint64_t> out((bits + 63) / 64);
  std::mt19937_64 rng(derive_seed(seed, {0x5eedULL}));
  for (auto& w : out) w = rng();
  if (bits % 64 != 0 && !out.empty()) out.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
  return out;
}

}  // namespace ktlab
