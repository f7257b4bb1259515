#include <doctest.h>

#include "ktlab/agpv.hpp"
#include "oracles.hpp"

using namespace ktlab;
using oracle::id;

TEST_CASE("bad example n=16 structure") {
  const BadExample be = bad_example({16, 2, 1});
  const Graph& g = be.graph;
  CHECK(g.n() == 16);
  CHECK(be.range(1) == std::pair<std::uint32_t, std::uint32_t>{1, 4});
  CHECK(be.range(2) == std::pair<std::uint32_t, std::uint32_t>{5, 8});
  CHECK(be.range(3) == std::pair<std::uint32_t, std::uint32_t>{9, 12});
  CHECK(be.range(4) == std::pair<std::uint32_t, std::uint32_t>{13, 16});
  for (std::uint32_t i = 1; i <= 4; ++i)
    for (std::uint32_t j = 9; j <= 12; ++j) CHECK(g.has_edge(id(i), id(j)));
  for (std::uint32_t i = 1; i < 4; ++i) CHECK(g.has_edge(id(i), id(i + 1)));
  for (std::uint32_t k = 0; k < 4; ++k) {
    CHECK(g.has_edge(id(9 + k), id(13 + k)));
    CHECK(g.has_edge(id(13 + k), id(5 + k)));
  }
  CHECK(g.m() == 16 + 3 + 8 + be.a2_edges);
  CHECK(diameter(g).value() <= 6);
}

TEST_CASE("bad example n=8") {
  const BadExample be = bad_example({8, 2, 3});
  CHECK(be.graph.has_edge(id(1), id(2)));
  CHECK(be.block == 2);
  CHECK_THROWS_AS(bad_example({10, 2, 0}), ParameterError);
  CHECK_THROWS_AS(bad_example({4, 2, 0}), ParameterError);
  CHECK_THROWS_AS(bad_example({16, 1, 0}), ParameterError);
}

TEST_CASE("bad example A2 girth") {
  for (std::size_t n : {64u, 256u}) {
    for (int rho : {2, 3}) {
      const BadExample be = bad_example({n, rho, 5});
      std::vector<NodeId> a2;
      for (std::uint32_t v = be.range(2).first; v <= be.range(2).second; ++v) a2.push_back(id(v));
      const Graph h = induced_subgraph(be.graph, a2);
      const int girth = oracle::girth(h);
      CHECK((girth == 0 || girth >= 2 * rho + 1));
      CHECK(static_cast<double>(be.a2_edges) >= be.a2_target / 4);
      CHECK_FALSE(be.shortfall);
      CHECK(diameter(be.graph).value() <= 6);
    }
  }
}

TEST_CASE("sparsify triangles") {
  const Graph tri = oracle::make(3, {{1, 2}, {2, 3}, {1, 3}});
  CHECK(agpv_sparsify(tri, 1).m() == 3);
  const Graph s = agpv_sparsify(tri, 2);
  CHECK(s.m() == 2);
  CHECK_FALSE(s.has_edge(id(2), id(3)));
  CHECK_THROWS_AS(EdgeWeights({{Edge(id(1), id(2)), 1.0}, {Edge(id(2), id(3)), 1.0}}), ContractError);
}

TEST_CASE("sparsify the bad example") {
  const BadExample be = bad_example({16, 2, 1});
  const Graph s = agpv_sparsify(be.graph, 2, {}, true);
  for (std::uint32_t i = 1; i <= 4; ++i)
    for (std::uint32_t j = 9; j <= 12; ++j) CHECK(s.has_edge(id(i), id(j)) == (i == 1));
  for (const Edge& e : be.a2_edge_list) CHECK(s.has_edge(e.u, e.v));
  CHECK(components(s).size() == 1);
  CHECK(diameter(s).value() >= 16 / 4 - 2);
}

TEST_CASE("sparsify equals the cycle oracle") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const Graph g = generate({Family::ErdosRenyi, 4 + s % 13, s, 0.3});
    for (int rho = 1; rho <= 3; ++rho) {
      const Graph out = agpv_sparsify(g, rho, {}, true);
      const auto marked = oracle::cycle_maxima(g, 2 * rho, [](const Edge& a, const Edge& b) { return a < b; });
      for (const Edge& e : g.edges()) CHECK(out.has_edge(e.u, e.v) == !marked.count(e));
      CHECK(components(out).size() == components(g).size());
    }
  }
}
