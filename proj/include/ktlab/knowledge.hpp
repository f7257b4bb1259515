#pragma once

#include <map>
#include <span>
#include <vector>

#include "ktlab/graph.hpp"

namespace ktlab {

/// A node's initial KT-rho knowledge: every ID within distance rho and the
/// adjacency list of every node within distance rho-1.
struct KnowledgeBall {
  NodeId owner;
  int radius = 0;
  std::vector<NodeId> known_ids;                     // sorted
  std::map<NodeId, std::vector<NodeId>> adjacency;   // sorted neighbor lists
  std::size_t owner_degree = 0;                      // known through ports even at rho = 0
};

/// Materializes the exact ball of `v` at radius `rho`.
KnowledgeBall khop_ball(const Graph& g, NodeId v, int rho);

/// Read-only window a node program gets onto its initial knowledge.
///
/// Queries outside the ball are protocol bugs. In audit mode every query is
/// checked against the owner's true ball and violations raise AuditError and
/// are counted; otherwise queries are answered straight from the graph.
class LocalView {
 public:
  LocalView(const Graph& g, int owner_index, int rho, bool audit, const std::vector<int>* ball_distance);

  NodeId self() const { return g_->id(owner_); }
  int rho() const { return rho_; }
  std::size_t degree() const { return g_->degree(owner_); }

  /// Own neighbors, ascending by ID (rho >= 1).
  std::span<const NodeId> neighbors() const;
  /// Adjacency of `u`, ascending by ID. Requires dist(self, u) <= rho-1.
  std::span<const NodeId> neighbors_of(NodeId u) const;
  /// True if `u` is a neighbor of `w`, using w's adjacency list.
  bool adjacent(NodeId w, NodeId u) const;
  /// Whether `x` is an ID this node knows (dist <= rho).
  bool knows(NodeId x) const;

 private:
  void check(NodeId u, int max_dist) const;

  const Graph* g_;
  int owner_;
  int rho_;
  bool audit_;
  const std::vector<int>* dist_;  // owner's bounded BFS distances (audit mode only), indexed by node index
};

/// Per-run cache of bounded BFS distance vectors for audit mode.
class BallCache {
 public:
  BallCache(const Graph& g, int rho);
  const std::vector<int>* distances(int index) const { return &dist_[static_cast<std::size_t>(index)]; }

 private:
  std::vector<std::vector<int>> dist_;
};

}  // namespace ktlab
