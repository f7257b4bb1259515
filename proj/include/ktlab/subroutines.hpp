#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "ktlab/engine.hpp"
#include "ktlab/outbox.hpp"

namespace ktlab {

/// 1-based position of view.self() among the sorted IDs of Nbrs(w).
/// Needs only 2-hop knowledge: 0 rounds, 0 messages.
int rank(const LocalView& view, NodeId w);

/// Depth-2 BFS tree rooted at `root`: (parent, child) pairs.
struct D2Tree {
  NodeId root;
  std::vector<std::pair<NodeId, NodeId>> edges;
};

/// Level-2 selection rule: a level-1 node forwards to `x` iff x is not in
/// Nbrs(root) or root itself and self is the minimum ID in Nbrs(root) ∩ Nbrs(x).
bool d2_forwards(const LocalView& view, NodeId root, NodeId x);

struct D2Result {
  D2Tree tree;
  RunResult run;
};

/// Runs the depth-2 BFS tree construction from `root` as a standalone program.
D2Result build_d2_bfs_tree(const Graph& g, NodeId root, RunConfig config = {});

/// Star cluster handed to GrowCluster.
struct Cluster {
  NodeId id;      // ID of the center
  NodeId center;
  std::vector<NodeId> members;  // includes the center, sorted
  std::vector<Edge> tree_edges;
  int depth = 0;
};

/// Center-local plan computed from 2-hop knowledge and V(C).
struct GrowPlan {
  std::size_t N = 0;  // |Nbrs(C)|
  std::map<NodeId, NodeId> parent;                 // x in Nbrs(C) -> min-ID neighbor inside C
  std::map<NodeId, std::vector<NodeId>> children;  // u in V(C) -> ch_T(u) outside C, ascending
  std::vector<NodeId> ldc;                         // members (not the center) with |ch_T| <= sqrt(N)
  std::vector<NodeId> hdc;                         // members with |ch_T| > sqrt(N)
};

/// GrowCluster planning: the local computation at the center.
/// Throws ContractError unless `members` forms a star around view.self().
GrowPlan plan_grow_cluster(const LocalView& center_view, std::span<const NodeId> members);

/// Per-node GrowCluster state machine, embeddable in larger programs.
///
/// The center calls start(); every node forwards GrowList/GrowEdge messages to
/// handle(). Nodes outside V(C) keep, per cluster, the edge to the
/// smallest-ID sender they heard from.
class GrowAgent {
 public:
  void start(NodeContext& ctx, std::span<const NodeId> members, EdgeQueues& out);
  /// Returns true if the message belonged to GrowCluster.
  bool handle(NodeContext& ctx, const Message& m, NodeId own_cluster, EdgeQueues& out);

  /// Edges this node adopted as a neighbor of some cluster: cluster id -> sender.
  const std::map<NodeId, NodeId>& adopted() const { return adopted_; }
  const std::optional<GrowPlan>& plan() const { return plan_; }

 private:
  std::optional<GrowPlan> plan_;
  NodeId list_from_;
  std::vector<NodeId> list_;
  std::map<NodeId, NodeId> adopted_;
};

struct GrowResult {
  std::set<Edge> edges;  // T \ E(C)
  GrowPlan plan;
  RunResult run;
};

/// Runs GrowCluster for one star cluster as a standalone program.
GrowResult grow_cluster(const Graph& g, const Cluster& c, RunConfig config = {});

}  // namespace ktlab
