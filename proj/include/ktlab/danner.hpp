#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ktlab/engine.hpp"
#include "ktlab/subroutines.hpp"

namespace ktlab {

/// Where an edge of H came from.
enum class Prov : std::uint8_t { Phase1Join, Phase1Dump, Phase2Join, Phase2LowDeg, Merge };

const char* to_string(Prov p);
Prov prov_from_string(const std::string& s);

struct DannerConfig {
  double delta = 0.25;
  int rho = 2;
  std::uint64_t seed = 0;
  std::uint64_t round_cap = 10'000'000;
  bool audit = false;
  /// Barrier constant for one merge iteration.
  double c_sync = 1.0;
  /// Independent sketch copies per level in FindAny.
  int c_findany = 3;
};

/// Everything one node remembers between phases. Programs touch only their
/// own record; the orchestrator reads all of them afterwards.
struct NodeMemory {
  bool sampled1 = false;
  bool sampled2 = false;
  bool inactive = false;
  NodeId cluster;                               // C1 cluster (center ID), or none
  std::vector<std::pair<NodeId, NodeId>> m1;    // (ID_S, sender); the edge is {sender, self}
  std::vector<NodeId> children;                 // centers: phase-1 joiners

  enum class Kind : std::uint8_t { None, Sampled, HighDegree, LowDegree } kind = Kind::None;
  NodeId joined_to;                             // C2 cluster a high-degree center connected to
  std::vector<Edge> join_path;                  // edges from this center's cluster to joined_to
  bool fallback = false;
  std::size_t m1_cluster = 0;                   // |M1(C)| at centers (low-delta branch)

  std::map<Edge, Prov> h;                       // H-edges this node knows it added
  std::map<NodeId, NodeId> grown;               // cluster -> member whose GrowCluster edge this node kept
  std::vector<NodeId> merge_partners;           // merge edges recorded by this node
};

struct ClusterRecord {
  NodeId id;
  std::vector<NodeId> members;   // sorted
  std::vector<Edge> tree_edges;  // may pass through relay nodes outside `members`
};

struct MergeStats {
  int iterations = 0;        // iterations run, including extra ones
  int extra_iterations = 0;  // beyond ceil(log2 n)
  std::uint64_t r_iter = 0;  // barrier length per iteration
  std::uint64_t barrier_rounds = 0;
  std::uint64_t eager_rounds = 0;
  std::uint64_t messages = 0;
  std::size_t edges_added = 0;
  std::size_t sketch_fallbacks = 0;
  std::size_t intra_component_additions = 0;  // must stay 0
  std::vector<std::size_t> components;         // H-component count before each iteration, then final
};

struct DannerState {
  double delta = 0;
  std::size_t n = 0;
  std::map<Edge, Prov> H;
  std::map<NodeId, ClusterRecord> c1;       // stars after phase 1
  std::map<NodeId, ClusterRecord> c2;       // sampled clusters after phase 2
  std::vector<NodeId> high_degree;          // centers of unsampled clusters that joined a C2 cluster
  std::vector<NodeId> low_degree;           // centers of unsampled clusters that grew (incl. fallbacks)
  std::vector<NodeId> inactive;
  std::vector<NodeMemory> memory;           // by dense index
  Metrics metrics;
  MergeStats merge;

  std::size_t max_m1() const;
};

/// Sampling probability n^{-delta}.
double sample_probability(std::size_t n, double delta);
/// ceil(n^{2 delta}).
std::uint64_t rank_threshold(std::size_t n, double delta);
/// (1/2) n^delta ln n.
double high_degree_threshold(std::size_t n, double delta);

DannerState phase1(const Graph& g, const DannerConfig& cfg);
/// delta in (1/3, 1/2].
void phase2_high(const Graph& g, DannerState& st, const DannerConfig& cfg);
/// delta in [0, 1/3].
void phase2_low(const Graph& g, DannerState& st, const DannerConfig& cfg);

struct Danner {
  DannerState state;
  std::vector<Edge> edges() const;
  Graph subgraph(const Graph& g) const;
};

/// Full pipeline: phase 1, the delta-appropriate phase 2, then cluster merging.
Danner build_danner(const Graph& g, const DannerConfig& cfg);

/// `u v tag` per line.
void write_danner(std::ostream& os, const DannerState& st);
std::map<Edge, Prov> read_danner(std::istream& is);

/// Diameter of a tree given by its edge list (0 for a single node).
int tree_diameter(const std::vector<Edge>& edges);

}  // namespace ktlab
