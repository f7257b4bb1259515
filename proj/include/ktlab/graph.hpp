#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ktlab/types.hpp"

namespace ktlab {

/// Undirected edge stored canonically with u < v.
struct Edge {
  NodeId u;
  NodeId v;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeHash {
  std::size_t operator()(const Edge& e) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{e.u.value} << 32) | e.v.value);
  }
};

/// Simple undirected graph with unique node IDs and per-node port numbering.
///
/// Nodes are also addressed by a dense index 0..n-1 (construction order),
/// which the simulator uses internally. Port p of node i (1-based) leads to
/// ports(i)[p-1].
class Graph {
 public:
  Graph() = default;

  /// Builds a graph. Rejects duplicate IDs, self-loops, parallel edges and
  /// edges naming unknown IDs. Ports are shuffled with `port_seed`.
  Graph(std::vector<NodeId> ids, const std::vector<Edge>& edges, std::uint64_t port_seed = 0);

  std::size_t n() const { return ids_.size(); }
  std::size_t m() const { return edges_.size(); }

  std::span<const NodeId> ids() const { return ids_; }
  NodeId id(int index) const { return ids_[static_cast<std::size_t>(index)]; }
  bool contains(NodeId id) const;
  /// Dense index of `id`; throws LookupError for unknown IDs.
  int index(NodeId id) const;

  /// Neighbor indices in port order.
  std::span<const int> ports(int index) const { return ports_[static_cast<std::size_t>(index)]; }
  /// Neighbor IDs sorted ascending.
  std::span<const NodeId> sorted_neighbors(int index) const { return sorted_ids_[static_cast<std::size_t>(index)]; }
  std::span<const NodeId> sorted_neighbors(NodeId id) const { return sorted_neighbors(index(id)); }
  std::size_t degree(int index) const { return ports_[static_cast<std::size_t>(index)].size(); }

  bool has_edge(NodeId a, NodeId b) const;
  /// 0-based position of `neighbor` in the port list of node `index`, or -1.
  int port_of(int index, NodeId neighbor) const;

  /// All edges, canonical and sorted.
  const std::vector<Edge>& edges() const { return edges_; }

  NodeId max_id() const { return max_id_; }

 private:
  std::vector<NodeId> ids_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> ports_;
  std::vector<std::vector<NodeId>> sorted_ids_;
  std::vector<std::vector<int>> sorted_port_pos_;
  std::vector<int> dense_index_;
  std::unordered_map<NodeId, int> sparse_index_;
  NodeId max_id_{};
};

enum class Family { Path, Star, Cycle, Complete, ErdosRenyi, RandomGeometric, Grid, BadExample };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// How generated node positions are mapped to IDs.
enum class IdMode {
  Random,   // seeded random permutation of 1..n
  Identity, // position i gets ID i+1 (the bad-example construction relies on this)
  Custom,   // caller-supplied map
};

struct GraphSpec {
  Family family = Family::Path;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double p = 0.0;       // erdos-renyi edge probability
  double radius = 0.0;  // random-geometric radius; <= 0 picks a connectivity-scale default
  int rho = 2;          // bad-example girth parameter
  IdMode id_mode = IdMode::Random;
  std::vector<std::uint32_t> custom_ids;  // used when id_mode == Custom
};

Graph generate(const GraphSpec& spec);

/// Assigns IDs to a positional edge list (nodes 0..n-1) according to `spec`.
Graph assign_ids(std::size_t n, const std::vector<std::pair<int, int>>& positional_edges, const GraphSpec& spec);

constexpr int kUnreachable = std::numeric_limits<int>::max();

/// BFS hop distances from `source` (by index). Unreachable nodes get kUnreachable.
/// If `limit` >= 0, exploration stops beyond that depth.
std::vector<int> bfs_distances(const Graph& g, int source, int limit = -1);

/// Exact diameter; std::nullopt means infinite (disconnected). Empty or single-node graphs have diameter 0.
std::optional<int> diameter(const Graph& g);

/// Connected components, each sorted ascending by ID, ordered by smallest member ID.
std::vector<std::vector<NodeId>> components(const Graph& g);

/// Subgraph of `g` on all of g's nodes keeping only `edges` (which must be edges of g).
Graph edge_subgraph(const Graph& g, const std::vector<Edge>& edges);

/// Induced subgraph on `nodes`.
Graph induced_subgraph(const Graph& g, const std::vector<NodeId>& nodes);

/// Plain-text edge list: first line `n m`, then `u v` per edge. The node set
/// is exactly the IDs 1..n; the loader rejects out-of-range IDs, self-loops and
/// duplicate edges. The writer requires IDs to be a permutation of 1..n.
void write_graph(std::ostream& os, const Graph& g);
Graph read_graph(std::istream& is);

}  // namespace ktlab
