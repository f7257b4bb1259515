#include "ktlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "ktlab/agpv.hpp"
#include "ktlab/random.hpp"

namespace ktlab {

Graph::Graph(std::vector<NodeId> ids, const std::vector<Edge>& edges, std::uint64_t port_seed)
    : ids_(std::move(ids)) {
  const std::size_t n = ids_.size();
  for (NodeId id : ids_) {
    if (!id.valid()) throw ParameterError("node IDs must be positive");
    max_id_ = std::max(max_id_, id);
  }
  if (max_id_.value <= 8 * n + 64) {
    dense_index_.assign(max_id_.value + 1, -1);
    for (std::size_t i = 0; i < n; ++i) {
      int& slot = dense_index_[ids_[i].value];
      if (slot != -1) throw ParameterError("duplicate node ID " + std::to_string(ids_[i].value));
      slot = static_cast<int>(i);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (!sparse_index_.emplace(ids_[i], static_cast<int>(i)).second)
        throw ParameterError("duplicate node ID " + std::to_string(ids_[i].value));
    }
  }

  edges_.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u == e.v) throw ParameterError("self-loop at node " + std::to_string(e.u.value));
    if (!contains(e.u) || !contains(e.v)) throw ParameterError("edge names an unknown node");
    edges_.push_back(e);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw ParameterError("parallel edge in input");

  ports_.assign(n, {});
  for (const Edge& e : edges_) {
    const int a = index(e.u);
    const int b = index(e.v);
    ports_[static_cast<std::size_t>(a)].push_back(b);
    ports_[static_cast<std::size_t>(b)].push_back(a);
  }
  sorted_ids_.assign(n, {});
  sorted_port_pos_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    auto& pl = ports_[i];
    std::mt19937_64 rng(derive_seed(port_seed, {static_cast<std::uint64_t>(Stream::Ports), ids_[i].word()}));
    std::shuffle(pl.begin(), pl.end(), rng);
    std::vector<int> order(pl.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return ids_[static_cast<std::size_t>(pl[static_cast<std::size_t>(x)])] < ids_[static_cast<std::size_t>(pl[static_cast<std::size_t>(y)])]; });
    auto& sid = sorted_ids_[i];
    sid.reserve(pl.size());
    for (int o : order) sid.push_back(ids_[static_cast<std::size_t>(pl[static_cast<std::size_t>(o)])]);
    sorted_port_pos_[i] = std::move(order);
  }
}

bool Graph::contains(NodeId id) const {
  if (!dense_index_.empty() || sparse_index_.empty()) {
    return id.value < dense_index_.size() && dense_index_[id.value] != -1;
  }
  return sparse_index_.count(id) != 0;
}

int Graph::index(NodeId id) const {
  if (!dense_index_.empty() || sparse_index_.empty()) {
    if (id.value < dense_index_.size() && dense_index_[id.value] != -1) return dense_index_[id.value];
  } else if (auto it = sparse_index_.find(id); it != sparse_index_.end()) {
    return it->second;
  }
  throw LookupError("unknown node " + std::to_string(id.value));
}

int Graph::port_of(int idx, NodeId neighbor) const {
  const auto& sid = sorted_ids_[static_cast<std::size_t>(idx)];
  auto it = std::lower_bound(sid.begin(), sid.end(), neighbor);
  if (it == sid.end() || *it != neighbor) return -1;
  return sorted_port_pos_[static_cast<std::size_t>(idx)][static_cast<std::size_t>(it - sid.begin())];
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (!contains(a) || !contains(b)) return false;
  return port_of(index(a), b) >= 0;
}

std::string to_string(Family f) {
  switch (f) {
    case Family::Path: return "path";
    case Family::Star: return "star";
    case Family::Cycle: return "cycle";
    case Family::Complete: return "complete";
    case Family::ErdosRenyi: return "erdos-renyi";
    case Family::RandomGeometric: return "random-geometric";
    case Family::Grid: return "grid";
    case Family::BadExample: return "bad-example";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  for (Family f : {Family::Path, Family::Star, Family::Cycle, Family::Complete, Family::ErdosRenyi,
                   Family::RandomGeometric, Family::Grid, Family::BadExample}) {
    if (to_string(f) == s) return f;
  }
  if (s == "er") return Family::ErdosRenyi;
  if (s == "rgg") return Family::RandomGeometric;
  throw ParameterError("unknown graph family '" + s + "'");
}

Graph assign_ids(std::size_t n, const std::vector<std::pair<int, int>>& positional_edges, const GraphSpec& spec) {
  std::vector<NodeId> ids(n);
  switch (spec.id_mode) {
    case IdMode::Identity:
      for (std::size_t i = 0; i < n; ++i) ids[i] = NodeId(static_cast<std::uint32_t>(i + 1));
      break;
    case IdMode::Custom:
      if (spec.custom_ids.size() != n) throw ParameterError("custom ID map must have exactly n entries");
      for (std::size_t i = 0; i < n; ++i) ids[i] = NodeId(spec.custom_ids[i]);
      break;
    case IdMode::Random: {
      std::vector<std::uint32_t> perm(n);
      std::iota(perm.begin(), perm.end(), 1u);
      std::mt19937_64 rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(Stream::Graph), 0x1dULL}));
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t i = 0; i < n; ++i) ids[i] = NodeId(perm[i]);
      break;
    }
  }
  std::vector<Edge> edges;
  edges.reserve(positional_edges.size());
  for (auto [a, b] : positional_edges) edges.emplace_back(ids[static_cast<std::size_t>(a)], ids[static_cast<std::size_t>(b)]);
  return Graph(std::move(ids), edges, derive_seed(spec.seed, {static_cast<std::uint64_t>(Stream::Ports)}));
}

Graph generate(const GraphSpec& spec) {
  if (spec.n < 1) throw ParameterError("n must be at least 1");
  const std::size_t n = spec.n;
  const int ni = static_cast<int>(n);
  std::vector<std::pair<int, int>> e;
  std::mt19937_64 rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(Stream::Graph)}));
  switch (spec.family) {
    case Family::Path:
      for (int i = 0; i + 1 < ni; ++i) e.emplace_back(i, i + 1);
      break;
    case Family::Star:
      for (int i = 1; i < ni; ++i) e.emplace_back(0, i);
      break;
    case Family::Cycle:
      for (int i = 0; i + 1 < ni; ++i) e.emplace_back(i, i + 1);
      if (ni >= 3) e.emplace_back(ni - 1, 0);
      break;
    case Family::Complete:
      for (int i = 0; i < ni; ++i)
        for (int j = i + 1; j < ni; ++j) e.emplace_back(i, j);
      break;
    case Family::ErdosRenyi: {
      if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw ParameterError("erdos-renyi p must lie in [0, 1]");
      std::bernoulli_distribution coin(spec.p);
      for (int i = 0; i < ni; ++i)
        for (int j = i + 1; j < ni; ++j)
          if (coin(rng)) e.emplace_back(i, j);
      break;
    }
    case Family::RandomGeometric: {
      if (spec.radius < 0.0) throw ParameterError("random-geometric radius must be non-negative");
      const double r = spec.radius > 0.0
                           ? spec.radius
                           : 1.5 * std::sqrt(std::log(std::max<double>(2.0, static_cast<double>(n))) / (M_PI * static_cast<double>(n)));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<std::pair<double, double>> pts(n);
      for (auto& p : pts) p = {u(rng), u(rng)};
      for (int i = 0; i < ni; ++i)
        for (int j = i + 1; j < ni; ++j) {
          const double dx = pts[static_cast<std::size_t>(i)].first - pts[static_cast<std::size_t>(j)].first;
          const double dy = pts[static_cast<std::size_t>(i)].second - pts[static_cast<std::size_t>(j)].second;
          if (dx * dx + dy * dy <= r * r) e.emplace_back(i, j);
        }
      break;
    }
    case Family::Grid: {
      const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
      for (int i = 0; i < ni; ++i) {
        if ((i % cols) + 1 < cols && i + 1 < ni) e.emplace_back(i, i + 1);
        if (i + cols < ni) e.emplace_back(i, i + cols);
      }
      break;
    }
    case Family::BadExample: {
      BadExampleSpec bs;
      bs.n = n;
      bs.rho = spec.rho;
      bs.seed = spec.seed;
      const BadExample be = bad_example(bs);
      // bad_example numbers vertices 1..n; re-map through the requested ID mode.
      for (const Edge& ed : be.graph.edges()) e.emplace_back(static_cast<int>(ed.u.value) - 1, static_cast<int>(ed.v.value) - 1);
      break;
    }
  }
  return assign_ids(n, e, spec);
}

std::vector<int> bfs_distances(const Graph& g, int source, int limit) {
  std::vector<int> dist(g.n(), kUnreachable);
  std::deque<int> q;
  dist[static_cast<std::size_t>(source)] = 0;
  q.push_back(source);
  while (!q.empty()) {
    const int x = q.front();
    q.pop_front();
    const int d = dist[static_cast<std::size_t>(x)];
    if (limit >= 0 && d >= limit) continue;
    for (int y : g.ports(x)) {
      if (dist[static_cast<std::size_t>(y)] == kUnreachable) {
        dist[static_cast<std::size_t>(y)] = d + 1;
        q.push_back(y);
      }
    }
  }
  return dist;
}

std::optional<int> diameter(const Graph& g) {
  int best = 0;
  for (int s = 0; s < static_cast<int>(g.n()); ++s) {
    for (int d : bfs_distances(g, s)) {
      if (d == kUnreachable) return std::nullopt;
      best = std::max(best, d);
    }
  }
  return best;
}

std::vector<std::vector<NodeId>> components(const Graph& g) {
  std::vector<int> comp(g.n(), -1);
  std::vector<std::vector<NodeId>> out;
  for (int s = 0; s < static_cast<int>(g.n()); ++s) {
    if (comp[static_cast<std::size_t>(s)] != -1) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack{s};
    comp[static_cast<std::size_t>(s)] = c;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      out.back().push_back(g.id(x));
      for (int y : g.ports(x)) {
        if (comp[static_cast<std::size_t>(y)] == -1) {
          comp[static_cast<std::size_t>(y)] = c;
          stack.push_back(y);
        }
      }
    }
  }
  for (auto& part : out) std::sort(part.begin(), part.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

Graph edge_subgraph(const Graph& g, const std::vector<Edge>& edges) {
  for (const Edge& e : edges)
    if (!g.has_edge(e.u, e.v)) throw ContractError("edge_subgraph: not an edge of the host graph");
  return Graph(std::vector<NodeId>(g.ids().begin(), g.ids().end()), edges);
}

Graph induced_subgraph(const Graph& g, const std::vector<NodeId>& nodes) {
  std::unordered_set<NodeId> keep(nodes.begin(), nodes.end());
  std::vector<Edge> edges;
  for (const Edge& e : g.edges())
    if (keep.count(e.u) && keep.count(e.v)) edges.push_back(e);
  return Graph(nodes, edges);
}

void write_graph(std::ostream& os, const Graph& g) {
  const auto n = g.n();
  if (g.max_id().value != n) throw ParameterError("graph file format requires IDs 1..n");
  os << n << ' ' << g.m() << '\n';
  for (const Edge& e : g.edges()) os << e.u.value << ' ' << e.v.value << '\n';
}

Graph read_graph(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(is, out)) {
      ++lineno;
      if (out.find_first_not_of(" \t\r") != std::string::npos && out[out.find_first_not_of(" \t\r")] != '#') return true;
    }
    return false;
  };
  if (!next_line(line)) throw SchemaError("graph file: missing header");
  std::istringstream hs(line);
  long long n = -1, m = -1;
  if (!(hs >> n >> m) || n < 1 || m < 0) throw SchemaError("graph file: bad header '" + line + "'");
  std::vector<NodeId> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (long long i = 1; i <= n; ++i) ids.emplace_back(static_cast<std::uint32_t>(i));
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    if (!next_line(line)) throw SchemaError("graph file: expected " + std::to_string(m) + " edges");
    std::istringstream ls(line);
    long long u = 0, v = 0;
    if (!(ls >> u >> v)) throw SchemaError("graph file: bad edge line " + std::to_string(lineno));
    if (u < 1 || v < 1 || u > n || v > n)
      throw ParameterError("graph file: ID out of range on line " + std::to_string(lineno));
    edges.emplace_back(NodeId(static_cast<std::uint32_t>(u)), NodeId(static_cast<std::uint32_t>(v)));
  }
  return Graph(std::move(ids), edges);
}

}  // namespace ktlab
