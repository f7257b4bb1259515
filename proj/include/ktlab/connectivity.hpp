#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ktlab/engine.hpp"

namespace ktlab {

/// (min ID, max ID) packed into one word.
constexpr Word edge_name(const Edge& e) { return (Word{e.u.value} << 32) | e.v.value; }
/// Inverse of edge_name; std::nullopt for words that are not canonical names.
std::optional<Edge> edge_from_name(Word name);

/// Seeds shared by every node for one FindAny invocation.
struct SketchParams {
  int copies = 3;
  int levels = 1;  // ceil(log2 (n choose 2)) + 1
  std::vector<std::uint64_t> hash_seeds;
  std::uint64_t fingerprint_seed = 0;

  static SketchParams make(std::size_t n, int copies, std::uint64_t seed);
  std::size_t slots() const { return static_cast<std::size_t>(copies) * static_cast<std::size_t>(levels); }
  Word fingerprint(Word name) const;
  /// Deepest level at which copy `c` keeps `name`.
  int depth(int copy, Word name) const;
};

/// Linear cut sketch: slot (copy, level) holds the XOR of kept edge names and
/// the XOR of their fingerprints.
class CutSketch {
 public:
  explicit CutSketch(const SketchParams& p) : p_(&p), slots_(p.slots()) {}

  void add(Word name);
  CutSketch& operator^=(const CutSketch& o);
  void xor_slot(std::size_t k, std::pair<Word, Word> s) {
    slots_[k].first ^= s.first;
    slots_[k].second ^= s.second;
  }
  const std::pair<Word, Word>& slot(std::size_t k) const { return slots_[k]; }
  std::size_t size() const { return slots_.size(); }

  /// True iff every level-0 slot is zero (the XOR of all names and fingerprints).
  bool empty() const;
  /// Some slot that isolates exactly one name, verified by its fingerprint.
  std::optional<Word> decode() const;

  friend bool operator==(const CutSketch& a, const CutSketch& b) { return a.slots_ == b.slots_; }

 private:
  std::size_t index(int copy, int level) const { return static_cast<std::size_t>(copy * p_->levels + level); }
  const SketchParams* p_;
  std::vector<std::pair<Word, Word>> slots_;
};

/// Per-node result of leader election: the leader's ID and the BFS-tree parent
/// toward it (none at the leader).
struct TreeNode {
  NodeId leader;
  NodeId parent;
};

/// Rank word a node draws for an election with this seed and salt.
std::uint64_t leader_rank(std::uint64_t seed, std::uint64_t salt, NodeId v);

struct LeaderOutcome {
  std::vector<TreeNode> nodes;  // by dense index
  RunResult run;
};

/// Max-(rank, ID) flooding over H. `h_neighbors[i]` lists the H-neighbors node
/// i knows; edges known to one side only are learned from received messages
/// and appended in place.
LeaderOutcome elect_leader(const Graph& g, std::vector<std::vector<NodeId>>& h_neighbors, const RunConfig& rc);

enum class FindStatus : std::uint8_t { None, Sketch, Fallback };

struct ComponentFind {
  NodeId leader;
  FindStatus status = FindStatus::None;
  std::optional<Edge> edge;
  bool fallback = false;  // the deterministic fallback ran
};

struct FindOutcome {
  std::map<NodeId, ComponentFind> by_leader;
  /// Edges each node recorded as newly added, by dense index.
  std::vector<std::vector<NodeId>> partners;
  RunResult run;
};

/// FindAny for every component simultaneously, over the trees from elect_leader.
/// Each component that finds an outgoing G-edge adds it (both endpoints record it).
FindOutcome find_outgoing(const Graph& g, const std::vector<TreeNode>& tree, const SketchParams& params,
                          const RunConfig& rc);

}  // namespace ktlab
