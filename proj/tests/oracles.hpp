// Independent reference implementations used by the tests.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "ktlab/graph.hpp"

namespace oracle {

using ktlab::Edge;
using ktlab::Graph;
using ktlab::NodeId;

inline NodeId id(std::uint32_t v) { return NodeId(v); }

/// Graph on IDs 1..n from (u, v) pairs.
inline Graph make(std::uint32_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& es,
                  std::uint64_t port_seed = 0) {
  std::vector<NodeId> ids;
  for (std::uint32_t i = 1; i <= n; ++i) ids.emplace_back(i);
  std::vector<Edge> edges;
  for (auto [a, b] : es) edges.emplace_back(NodeId(a), NodeId(b));
  return Graph(ids, edges, port_seed);
}

inline Graph path(std::uint32_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> es;
  for (std::uint32_t i = 1; i < n; ++i) es.emplace_back(i, i + 1);
  return make(n, es);
}

/// Adjacency matrix keyed by dense index, from g.has_edge only.
inline std::vector<std::vector<int>> floyd(const Graph& g) {
  const int n = static_cast<int>(g.n());
  const int inf = 1 << 28;
  std::vector<std::vector<int>> d(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), inf));
  for (int i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (int j = 0; j < n; ++j)
      if (i != j && g.has_edge(g.id(i), g.id(j))) d[i][j] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

inline constexpr int kInf = 1 << 28;

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[static_cast<std::size_t>(x)] == x ? x : p[static_cast<std::size_t>(x)] = find(p[static_cast<std::size_t>(x)]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

/// Component label per dense index, using union-find over the edge list.
inline std::vector<int> component_labels(const Graph& g, const std::vector<Edge>& edges) {
  UnionFind uf(g.n());
  for (const Edge& e : edges) uf.unite(g.index(e.u), g.index(e.v));
  std::vector<int> lab(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) lab[i] = uf.find(static_cast<int>(i));
  return lab;
}

/// Largest finite BFS distance in the graph formed by an edge list (0 if empty).
inline int edge_list_diameter(const std::vector<Edge>& edges) {
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const Edge& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  int best = 0;
  for (const auto& [s, unused] : adj) {
    std::map<NodeId, int> dist{{s, 0}};
    std::vector<NodeId> q{s};
    for (std::size_t h = 0; h < q.size(); ++h)
      for (NodeId y : adj[q[h]])
        if (dist.emplace(y, dist[q[h]] + 1).second) {
          best = std::max(best, dist[y]);
          q.push_back(y);
        }
  }
  return best;
}

/// Kruskal minimum spanning forest under the strict order `less`.
template <class Less>
std::vector<Edge> kruskal(const Graph& g, Less less) {
  std::vector<Edge> es = g.edges();
  std::sort(es.begin(), es.end(), less);
  UnionFind uf(g.n());
  std::vector<Edge> out;
  for (const Edge& e : es)
    if (uf.unite(g.index(e.u), g.index(e.v))) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

/// Labels renumbered by first occurrence, so equal partitions compare equal.
inline std::vector<int> canonical(const std::vector<int>& lab) {
  std::map<int, int> first;
  std::vector<int> out(lab.size());
  for (std::size_t i = 0; i < lab.size(); ++i) out[i] = first.emplace(lab[i], static_cast<int>(first.size())).first->second;
  return out;
}

inline bool same_components(const Graph& g, const std::vector<Edge>& a, const std::vector<Edge>& b) {
  return canonical(component_labels(g, a)) == canonical(component_labels(g, b));
}

/// Expected depth-2 BFS tree: level-2 x attaches to min(Nbrs(root) ∩ Nbrs(x)).
inline std::set<std::pair<NodeId, NodeId>> d2_tree(const Graph& g, NodeId root) {
  std::set<std::pair<NodeId, NodeId>> out;
  std::set<NodeId> level1;
  for (const Edge& e : g.edges()) {
    if (e.u == root) level1.insert(e.v);
    if (e.v == root) level1.insert(e.u);
  }
  for (NodeId w : level1) out.emplace(root, w);
  std::map<NodeId, NodeId> best;
  for (const Edge& e : g.edges()) {
    for (auto [w, x] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
      if (!level1.count(w) || x == root || level1.count(x)) continue;
      auto it = best.find(x);
      if (it == best.end() || w < it->second) best[x] = w;
    }
  }
  for (auto [x, w] : best) out.emplace(w, x);
  return out;
}

/// Expected GrowCluster output: each outside neighbor of the cluster attached
/// to its smallest-ID neighbor inside the cluster.
inline std::set<Edge> grow_tree(const Graph& g, const std::vector<NodeId>& members) {
  std::set<NodeId> c(members.begin(), members.end());
  std::map<NodeId, NodeId> best;
  for (const Edge& e : g.edges()) {
    for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
      if (!c.count(a) || c.count(b)) continue;
      auto it = best.find(b);
      if (it == best.end() || a < it->second) best[b] = a;
    }
  }
  std::set<Edge> out;
  for (auto [x, a] : best) out.insert(Edge(a, x));
  return out;
}

/// Heaviest edges of all simple cycles of length <= maxlen, by DFS enumeration.
/// `less` orders edges.
template <class Less>
std::set<Edge> cycle_maxima(const Graph& g, int maxlen, Less less) {
  std::set<Edge> marked;
  const int n = static_cast<int>(g.n());
  std::vector<char> on(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  // Cycles are enumerated from their smallest-index vertex s.
  std::function<void(int, int)> dfs = [&](int s, int x) {
    for (NodeId yid : g.sorted_neighbors(x)) {
      const int y = g.index(yid);
      if (y == s && stack.size() >= 3) {
        Edge heavy(g.id(stack.back()), g.id(s));
        for (std::size_t i = 0; i + 1 < stack.size(); ++i) {
          Edge e(g.id(stack[i]), g.id(stack[i + 1]));
          if (less(heavy, e)) heavy = e;
        }
        marked.insert(heavy);
        continue;
      }
      if (y <= s || on[static_cast<std::size_t>(y)] || static_cast<int>(stack.size()) >= maxlen) continue;
      on[static_cast<std::size_t>(y)] = 1;
      stack.push_back(y);
      dfs(s, y);
      stack.pop_back();
      on[static_cast<std::size_t>(y)] = 0;
    }
  };
  for (int s = 0; s < n; ++s) {
    on[static_cast<std::size_t>(s)] = 1;
    stack = {s};
    dfs(s, s);
    on[static_cast<std::size_t>(s)] = 0;
  }
  return marked;
}

/// Girth of g (0 if acyclic), by BFS from every vertex.
inline int girth(const Graph& g) {
  int best = 0;
  const int n = static_cast<int>(g.n());
  for (int s = 0; s < n; ++s) {
    std::vector<int> dist(static_cast<std::size_t>(n), -1), par(static_cast<std::size_t>(n), -1);
    std::vector<int> q{s};
    dist[static_cast<std::size_t>(s)] = 0;
    for (std::size_t h = 0; h < q.size(); ++h) {
      const int x = q[h];
      for (NodeId yid : g.sorted_neighbors(x)) {
        const int y = g.index(yid);
        if (dist[static_cast<std::size_t>(y)] < 0) {
          dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
          par[static_cast<std::size_t>(y)] = x;
          q.push_back(y);
        } else if (par[static_cast<std::size_t>(x)] != y) {
          const int len = dist[static_cast<std::size_t>(x)] + dist[static_cast<std::size_t>(y)] + 1;
          if (best == 0 || len < best) best = len;
        }
      }
    }
  }
  return best;
}

}  // namespace oracle
