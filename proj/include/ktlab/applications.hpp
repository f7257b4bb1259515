#pragma once

#include <optional>
#include <vector>

#include "ktlab/connectivity.hpp"
#include "ktlab/danner.hpp"
#include "ktlab/weights.hpp"

namespace ktlab {

struct BroadcastResult {
  std::vector<char> informed;  // by dense index
  std::size_t informed_count = 0;
  RunResult run;
};

/// Flooding from `source` over the edges of `h` (a subset of g's edges).
/// Each node forwards once, to every H-neighbor it did not hear from.
BroadcastResult broadcast(const Graph& g, const std::vector<Edge>& h, NodeId source, const RunConfig& rc);

struct SpanningTree {
  std::vector<TreeNode> nodes;  // leader and parent per dense index
  std::vector<Edge> edges;      // sorted
  std::vector<std::vector<NodeId>> children;  // learned from one round of notices
  RunResult run;
};

/// BFS tree of H per component, rooted at the component's elected leader.
SpanningTree spanning_tree(const Graph& g, const std::vector<Edge>& h, const RunConfig& rc);

struct LeaderResult {
  std::vector<NodeId> leader;  // by dense index
  RunResult run;
};

/// One leader per component of H.
LeaderResult global_leader_election(const Graph& g, const std::vector<Edge>& h, const RunConfig& rc);

struct MstResult {
  std::vector<Edge> edges;  // sorted
  int iterations = 0;       // weighted Boruvka iterations over fragments
  Metrics metrics;          // phases: danner, spanning-tree, mst-merge
};

/// Minimum spanning forest: danner, BFS tree over it, then Boruvka from
/// singleton fragments where each fragment convergecasts its lightest
/// outgoing edge and termination is agreed over the danner's tree.
/// Requires delta in [0, 1/4].
MstResult mst(const Graph& g, const EdgeWeights& weights, const DannerConfig& cfg);

}  // namespace ktlab
