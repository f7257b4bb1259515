#include "ktlab/knowledge.hpp"

#include <algorithm>
#include <string>

namespace ktlab {

KnowledgeBall khop_ball(const Graph& g, NodeId v, int rho) {
  if (rho < 0) throw ParameterError("rho must be non-negative");
  const int vi = g.index(v);
  KnowledgeBall ball;
  ball.owner = v;
  ball.radius = rho;
  ball.owner_degree = g.degree(vi);
  const auto dist = bfs_distances(g, vi, rho);
  for (int i = 0; i < static_cast<int>(g.n()); ++i) {
    const int d = dist[static_cast<std::size_t>(i)];
    if (d == kUnreachable) continue;
    ball.known_ids.push_back(g.id(i));
    if (d <= rho - 1) {
      auto nb = g.sorted_neighbors(i);
      ball.adjacency.emplace(g.id(i), std::vector<NodeId>(nb.begin(), nb.end()));
    }
  }
  std::sort(ball.known_ids.begin(), ball.known_ids.end());
  return ball;
}

LocalView::LocalView(const Graph& g, int owner_index, int rho, bool audit, const std::vector<int>* ball_distance)
    : g_(&g), owner_(owner_index), rho_(rho), audit_(audit), dist_(ball_distance) {}

void LocalView::check(NodeId u, int max_dist) const {
  if (!audit_) return;
  const int ui = g_->contains(u) ? g_->index(u) : -1;
  const int d = ui < 0 ? kUnreachable : (*dist_)[static_cast<std::size_t>(ui)];
  if (d > max_dist) {
    throw AuditError("node " + std::to_string(self().value) + " queried knowledge about node " +
                     std::to_string(u.value) + " outside its radius-" + std::to_string(rho_) + " ball");
  }
}

std::span<const NodeId> LocalView::neighbors() const {
  if (audit_ && rho_ < 1) throw AuditError("neighbor IDs are unknown at rho = 0");
  return g_->sorted_neighbors(owner_);
}

std::span<const NodeId> LocalView::neighbors_of(NodeId u) const {
  check(u, rho_ - 1);
  return g_->sorted_neighbors(g_->index(u));
}

bool LocalView::adjacent(NodeId w, NodeId u) const {
  auto nb = neighbors_of(w);
  return std::binary_search(nb.begin(), nb.end(), u);
}

bool LocalView::knows(NodeId x) const {
  if (!g_->contains(x)) return false;
  if (!audit_) {
    // Non-audit views answer from the graph without materializing the ball.
    if (x == self()) return true;
    if (rho_ >= 1 && std::binary_search(g_->sorted_neighbors(owner_).begin(), g_->sorted_neighbors(owner_).end(), x))
      return true;
    if (rho_ >= 2) {
      for (NodeId w : g_->sorted_neighbors(owner_))
        if (std::binary_search(g_->sorted_neighbors(g_->index(w)).begin(), g_->sorted_neighbors(g_->index(w)).end(), x))
          return true;
      if (rho_ == 2) return false;
    }
    if (rho_ <= 1) return false;
    return bfs_distances(*g_, owner_, rho_)[static_cast<std::size_t>(g_->index(x))] <= rho_;
  }
  return (*dist_)[static_cast<std::size_t>(g_->index(x))] <= rho_;
}

BallCache::BallCache(const Graph& g, int rho) {
  dist_.reserve(g.n());
  for (int i = 0; i < static_cast<int>(g.n()); ++i) dist_.push_back(bfs_distances(g, i, rho));
}

}  // namespace ktlab
