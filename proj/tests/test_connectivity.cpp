#include <random>
#include <set>

#include "doctest.h"
#include "ktlab/connectivity.hpp"
#include "ktlab/graph.hpp"
#include "oracles.hpp"

using namespace ktlab;

namespace {

std::vector<std::vector<NodeId>> adjacency(const Graph& g, const std::vector<Edge>& edges) {
  std::vector<std::vector<NodeId>> a(g.n());
  for (const Edge& e : edges) {
    a[static_cast<std::size_t>(g.index(e.u))].push_back(e.v);
    a[static_cast<std::size_t>(g.index(e.v))].push_back(e.u);
  }
  for (auto& v : a) std::sort(v.begin(), v.end());
  return a;
}

RunConfig rc_with(std::uint64_t seed, std::uint64_t salt = 0) {
  RunConfig rc;
  rc.seed = seed;
  rc.salt = salt;
  rc.audit = true;
  return rc;
}

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  GraphSpec s;
  s.family = Family::ErdosRenyi;
  s.n = n;
  s.p = p;
  s.seed = seed;
  return generate(s);
}

}  // namespace

TEST_CASE("edge names") {
  const Edge e(NodeId(9), NodeId(4));
  CHECK(edge_name(e) == ((Word{4} << 32) | 9));
  CHECK(edge_name(e) == edge_name(Edge(NodeId(4), NodeId(9))));
  CHECK(edge_from_name(edge_name(e)) == e);
  CHECK_FALSE(edge_from_name(0).has_value());
  CHECK_FALSE(edge_from_name((Word{7} << 32) | 3).has_value());  // min > max
  CHECK_FALSE(edge_from_name((Word{7} << 32) | 7).has_value());
}

TEST_CASE("cut sketch linearity and cancellation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Graph g = random_graph(20, 0.3, static_cast<std::uint64_t>(trial));
    const SketchParams p = SketchParams::make(g.n(), 3, rng());
    CHECK(p.levels == 9);  // ceil(log2 190) + 1
    std::vector<CutSketch> sk(g.n(), CutSketch(p));
    for (const Edge& e : g.edges()) {
      sk[static_cast<std::size_t>(g.index(e.u))].add(edge_name(e));
      sk[static_cast<std::size_t>(g.index(e.v))].add(edge_name(e));
    }
    // Random node subset S: XOR of sketches equals the sketch of the cut edges.
    std::vector<char> in(g.n());
    for (auto& b : in) b = static_cast<char>(rng() & 1);
    CutSketch sum(p), cut(p), all(p);
    for (std::size_t i = 0; i < g.n(); ++i) {
      all ^= sk[i];
      if (in[i]) sum ^= sk[i];
    }
    for (const Edge& e : g.edges())
      if (in[static_cast<std::size_t>(g.index(e.u))] != in[static_cast<std::size_t>(g.index(e.v))]) cut.add(edge_name(e));
    CHECK(sum == cut);
    CHECK(all.empty());
    if (auto name = sum.decode()) {
      auto e = edge_from_name(*name);
      REQUIRE(e.has_value());
      CHECK(g.has_edge(e->u, e->v));
      CHECK(in[static_cast<std::size_t>(g.index(e->u))] != in[static_cast<std::size_t>(g.index(e->v))]);
    }
  }
}

TEST_CASE("leader election: isolated nodes and two components") {
  Graph g = oracle::make(5, {{1, 2}, {2, 3}, {4, 5}});
  auto h = adjacency(g, g.edges());
  auto out = elect_leader(g, h, rc_with(3));
  CHECK(out.nodes[0].leader == out.nodes[1].leader);
  CHECK(out.nodes[1].leader == out.nodes[2].leader);
  CHECK(out.nodes[3].leader == out.nodes[4].leader);
  CHECK(out.nodes[0].leader != out.nodes[3].leader);

  Graph single = oracle::make(1, {});
  std::vector<std::vector<NodeId>> none(1);
  auto s = elect_leader(single, none, rc_with(1));
  CHECK(s.nodes[0].leader == NodeId(1));
  CHECK_FALSE(s.nodes[0].parent.valid());
}

TEST_CASE("leader election matches the max-rank oracle on random trees") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint32_t n = 200;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> es;
    for (std::uint32_t v = 2; v <= n; ++v) es.emplace_back(static_cast<std::uint32_t>(rng() % (v - 1)) + 1, v);
    Graph g = oracle::make(n, es, rng());
    auto h = adjacency(g, g.edges());
    const RunConfig rc = rc_with(rng(), static_cast<std::uint64_t>(trial));
    auto out = elect_leader(g, h, rc);
    NodeId best = g.id(0);
    for (std::size_t i = 1; i < g.n(); ++i) {
      const NodeId v = g.id(static_cast<int>(i));
      if (std::pair(leader_rank(rc.seed, rc.salt, v), v) > std::pair(leader_rank(rc.seed, rc.salt, best), best)) best = v;
    }
    const auto d = oracle::floyd(g);
    const int li = g.index(best);
    int diam = 0;
    for (auto& row : d)
      for (int x : row) diam = std::max(diam, x);
    for (std::size_t i = 0; i < g.n(); ++i) {
      CHECK(out.nodes[i].leader == best);
      if (static_cast<int>(i) == li) {
        CHECK_FALSE(out.nodes[i].parent.valid());
        continue;
      }
      const int pi = g.index(out.nodes[i].parent);
      CHECK(d[static_cast<std::size_t>(pi)][static_cast<std::size_t>(li)] + 1 == d[i][static_cast<std::size_t>(li)]);
    }
    CHECK(out.run.rounds <= static_cast<std::uint64_t>(2 * diam + 2));
  }
}

TEST_CASE("leader election learns one-sided H edges") {
  Graph g = oracle::path(3);
  std::vector<std::vector<NodeId>> h(3);
  h[0] = {NodeId(2)};  // only node 1 knows {1,2}
  h[2] = {NodeId(2)};  // only node 3 knows {2,3}
  auto out = elect_leader(g, h, rc_with(4));
  CHECK(out.nodes[0].leader == out.nodes[2].leader);
  CHECK(h[1] == std::vector<NodeId>{NodeId(1), NodeId(3)});
}

TEST_CASE("find_outgoing on small fixed cases") {
  Graph g = oracle::path(3);
  auto h = adjacency(g, {Edge(NodeId(1), NodeId(2))});
  auto tree = elect_leader(g, h, rc_with(2));
  const auto p = SketchParams::make(g.n(), 3, 77);
  auto found = find_outgoing(g, tree.nodes, p, rc_with(2));
  const auto& k = found.by_leader.at(tree.nodes[0].leader);
  REQUIRE(k.edge.has_value());
  CHECK(*k.edge == Edge(NodeId(2), NodeId(3)));

  auto whole = adjacency(g, g.edges());
  auto t2 = elect_leader(g, whole, rc_with(3));
  auto f2 = find_outgoing(g, t2.nodes, p, rc_with(3));
  REQUIRE(f2.by_leader.size() == 1);
  CHECK(f2.by_leader.begin()->second.status == FindStatus::None);
  CHECK_FALSE(f2.by_leader.begin()->second.edge.has_value());
  for (const auto& v : f2.partners) CHECK(v.empty());
}

TEST_CASE("find_outgoing against the brute-force boundary oracle") {
  std::mt19937_64 rng(2024);
  int with_boundary = 0, sketch_ok = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 4 + rng() % 61;
    Graph g = random_graph(n, 0.05 + 0.3 * static_cast<double>(rng() % 100) / 100.0, rng());
    // K: a BFS ball around a random start, truncated to a random size; H = its BFS tree.
    const int start = static_cast<int>(rng() % n);
    const std::size_t want = 1 + rng() % n;
    std::vector<int> order{start};
    std::vector<char> in(n, 0);
    in[static_cast<std::size_t>(start)] = 1;
    std::vector<Edge> tree_edges;
    for (std::size_t h = 0; h < order.size() && order.size() < want; ++h)
      for (NodeId w : g.sorted_neighbors(order[h])) {
        const int j = g.index(w);
        if (in[static_cast<std::size_t>(j)] || order.size() >= want) continue;
        in[static_cast<std::size_t>(j)] = 1;
        order.push_back(j);
        tree_edges.emplace_back(g.id(order[h]), w);
      }
    std::set<Edge> boundary;
    for (const Edge& e : g.edges())
      if (in[static_cast<std::size_t>(g.index(e.u))] != in[static_cast<std::size_t>(g.index(e.v))]) boundary.insert(e);

    auto h = adjacency(g, tree_edges);
    const RunConfig rc = rc_with(rng());
    auto tree = elect_leader(g, h, rc);
    const auto params = SketchParams::make(n, 3, rng());
    auto found = find_outgoing(g, tree.nodes, params, rc);
    const auto& k = found.by_leader.at(tree.nodes[static_cast<std::size_t>(start)].leader);
    CHECK(k.edge.has_value() == !boundary.empty());
    if (k.edge) CHECK(boundary.count(*k.edge));
    if (!boundary.empty()) {
      ++with_boundary;
      sketch_ok += k.status == FindStatus::Sketch && !k.fallback;
    }
    // Every recorded partner edge is a real G-edge that leaves its component.
    for (std::size_t i = 0; i < n; ++i)
      for (NodeId w : found.partners[i]) {
        CHECK(g.has_edge(g.id(static_cast<int>(i)), w));
        CHECK(tree.nodes[i].leader != tree.nodes[static_cast<std::size_t>(g.index(w))].leader);
      }
  }
  CHECK(with_boundary > 100);
  CHECK(static_cast<double>(sketch_ok) >= 0.9 * with_boundary);
}
