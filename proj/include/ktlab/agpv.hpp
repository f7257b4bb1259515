#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ktlab/graph.hpp"
#include "ktlab/weights.hpp"

namespace ktlab {

struct BadExampleSpec {
  std::size_t n = 16;  // multiple of 4, at least 8
  int rho = 2;         // at least 2
  std::uint64_t seed = 0;
};

/// Lower-bound instance: four blocks A1..A4 of n/4 consecutive IDs.
struct BadExample {
  Graph graph;
  std::size_t block = 0;          // n/4
  double a2_target = 0;           // (1/4)(n/4)^{1+1/(2rho+1)}
  std::size_t a2_edges = 0;       // edges actually placed inside A2
  bool shortfall = false;         // fewer than a2_target/4 edges placed
  std::vector<Edge> a2_edge_list;

  /// First and last ID of block i (1-based).
  std::pair<std::uint32_t, std::uint32_t> range(int i) const {
    const auto q = static_cast<std::uint32_t>(block);
    return {static_cast<std::uint32_t>(i - 1) * q + 1, static_cast<std::uint32_t>(i) * q};
  }
};

/// Builds the lower-bound graph. A2 edges are inserted at random and rejected
/// whenever they would close a cycle of length at most 2rho inside A2.
BadExample bad_example(const BadExampleSpec& spec);

/// Drops every edge that is the heaviest edge of some cycle of length at
/// most 2rho in `g`. Each decision uses only the radius-rho knowledge of the
/// edge's smaller endpoint; with `audit` set, that discipline is enforced.
Graph agpv_sparsify(const Graph& g, int rho, const EdgeWeights& weights = {}, bool audit = false);

}  // namespace ktlab
