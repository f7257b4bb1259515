#include "ktlab/agpv.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "ktlab/knowledge.hpp"
#include "ktlab/random.hpp"

namespace ktlab {

namespace {

// Hop distance between a and b in the adjacency lists `adj`, capped at `limit`+1.
int capped_distance(const std::vector<std::vector<int>>& adj, int a, int b, int limit) {
  if (a == b) return 0;
  std::vector<int> dist(adj.size(), -1);
  std::vector<int> frontier{a}, next;
  dist[static_cast<std::size_t>(a)] = 0;
  for (int d = 1; d <= limit && !frontier.empty(); ++d) {
    next.clear();
    for (int x : frontier)
      for (int y : adj[static_cast<std::size_t>(x)]) {
        if (dist[static_cast<std::size_t>(y)] >= 0) continue;
        if (y == b) return d;
        dist[static_cast<std::size_t>(y)] = d;
        next.push_back(y);
      }
    frontier.swap(next);
  }
  return limit + 1;
}

}  // namespace

BadExample bad_example(const BadExampleSpec& spec) {
  if (spec.n < 8 || spec.n % 4 != 0) throw ParameterError("bad_example: n must be a multiple of 4 and at least 8");
  if (spec.rho < 2) throw ParameterError("bad_example: rho must be at least 2");
  const std::size_t q = spec.n / 4;
  BadExample out;
  out.block = q;
  out.a2_target = 0.25 * std::pow(static_cast<double>(q), 1.0 + 1.0 / (2.0 * spec.rho + 1.0));

  auto id = [&](int block, std::size_t k) { return NodeId(static_cast<std::uint32_t>((block - 1) * q + k + 1)); };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) edges.emplace_back(id(1, i), id(3, j));
  for (std::size_t i = 0; i + 1 < q; ++i) edges.emplace_back(id(1, i), id(1, i + 1));
  for (std::size_t k = 0; k < q; ++k) {
    edges.emplace_back(id(3, k), id(4, k));
    edges.emplace_back(id(4, k), id(2, k));
  }

  // A2 edges: keep only insertions whose endpoints are already >= 2rho apart.
  const auto target = static_cast<std::size_t>(std::ceil(out.a2_target));
  const std::size_t max_attempts = 50 * target + 1000;
  std::vector<std::vector<int>> adj(q);
  std::mt19937_64 rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(Stream::Graph), 0xa2}));
  std::uniform_int_distribution<std::size_t> pick(0, q - 1);
  for (std::size_t attempt = 0; attempt < max_attempts && out.a2_edges < target; ++attempt) {
    const auto a = static_cast<int>(pick(rng));
    const auto b = static_cast<int>(pick(rng));
    if (a == b) continue;
    if (capped_distance(adj, a, b, 2 * spec.rho - 1) < 2 * spec.rho) continue;
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
    out.a2_edge_list.emplace_back(id(2, static_cast<std::size_t>(a)), id(2, static_cast<std::size_t>(b)));
    ++out.a2_edges;
  }
  out.shortfall = static_cast<double>(out.a2_edges) < out.a2_target / 4.0;
  edges.insert(edges.end(), out.a2_edge_list.begin(), out.a2_edge_list.end());

  std::vector<NodeId> ids;
  for (std::size_t i = 0; i < spec.n; ++i) ids.emplace_back(static_cast<std::uint32_t>(i + 1));
  out.graph = Graph(std::move(ids), edges, derive_seed(spec.seed, {static_cast<std::uint64_t>(Stream::Ports)}));
  return out;
}

Graph agpv_sparsify(const Graph& g, int rho, const EdgeWeights& weights, bool audit) {
  if (rho < 1) throw ParameterError("agpv_sparsify: rho must be at least 1");
  weights.require_cover(g);
  std::unique_ptr<BallCache> balls;
  if (audit) balls = std::make_unique<BallCache>(g, rho);

  // Distances in the lighter subgraph, grown from u (depth <= rho) and from v
  // (depth <= rho-1). Nodes are expanded only when their adjacency lies
  // inside u's ball: depth <= rho-1 from u, depth <= rho-2 from v.
  std::vector<int> du(g.n(), -1), dv(g.n(), -1);
  std::vector<int> touched;
  auto grow = [&](const LocalView& view, NodeId src, const EdgeWeights::Key& bound, int expand_depth,
                  std::vector<int>& dist) {
    std::vector<NodeId> frontier{src}, next;
    dist[static_cast<std::size_t>(g.index(src))] = 0;
    touched.push_back(g.index(src));
    for (int d = 0; d < expand_depth + 1 && !frontier.empty(); ++d) {
      next.clear();
      for (NodeId x : frontier) {
        auto nb = x == view.self() ? view.neighbors() : view.neighbors_of(x);
        for (NodeId y : nb) {
          const int yi = g.index(y);
          if (dist[static_cast<std::size_t>(yi)] >= 0) continue;
          if (!(weights.key(Edge(x, y)) < bound)) continue;
          dist[static_cast<std::size_t>(yi)] = d + 1;
          touched.push_back(yi);
          next.push_back(y);
        }
      }
      frontier.swap(next);
    }
  };

  std::vector<Edge> kept;
  kept.reserve(g.m());
  for (const Edge& e : g.edges()) {
    const int ui = g.index(e.u);
    const LocalView view(g, ui, rho, audit, balls ? balls->distances(ui) : nullptr);
    const auto bound = weights.key(e);
    touched.clear();
    grow(view, e.u, bound, rho - 1, du);
    const std::vector<int> from_u = touched;
    touched.clear();
    if (rho >= 2) grow(view, e.v, bound, rho - 2, dv);
    else {
      dv[static_cast<std::size_t>(g.index(e.v))] = 0;
      touched.push_back(g.index(e.v));
    }
    bool heaviest = false;
    for (int x : touched) {
      const int a = du[static_cast<std::size_t>(x)];
      const int b = dv[static_cast<std::size_t>(x)];
      if (a >= 0 && b >= 0 && a + b <= 2 * rho - 1) {
        heaviest = true;
        break;
      }
    }
    for (int x : from_u) du[static_cast<std::size_t>(x)] = -1;
    for (int x : touched) dv[static_cast<std::size_t>(x)] = -1;
    if (!heaviest) kept.push_back(e);
  }
  return edge_subgraph(g, kept);
}

}  // namespace ktlab
