#pragma once

#include "ktlab/connectivity.hpp"
#include "ktlab/danner.hpp"

namespace ktlab {

/// ceil(log2 n); 0 for n <= 1.
int merge_iterations(std::size_t n);
/// Per-iteration barrier ceil(c_sync * n^{1-2 delta} * log2(n)^2), at least 1.
std::uint64_t merge_barrier(std::size_t n, double delta, double c_sync);

/// Boruvka-style merging of H-components over G: each iteration elects a
/// leader per component and adds one outgoing edge found by FindAny. Runs
/// ceil(log2 n) iterations, then extra ones (logged) while some component
/// still has an outgoing G-edge.
void cluster_merge(const Graph& g, DannerState& st, const DannerConfig& cfg);

}  // namespace ktlab
