#pragma once

#include <iosfwd>
#include <unordered_map>
#include <utility>

#include "ktlab/graph.hpp"

namespace ktlab {

/// Distinct edge weights. Without explicit values, edges are ordered
/// lexicographically by their (smaller ID, larger ID) pair.
class EdgeWeights {
 public:
  using Key = std::pair<double, Edge>;

  EdgeWeights() = default;
  /// Throws ContractError if two edges share a weight.
  explicit EdgeWeights(std::unordered_map<Edge, double, EdgeHash> values);

  bool custom() const { return !values_.empty(); }
  /// Total-order key; throws LookupError for an edge without a weight.
  Key key(const Edge& e) const;
  bool less(const Edge& a, const Edge& b) const { return key(a) < key(b); }
  /// Checks that every edge of `g` has a weight.
  void require_cover(const Graph& g) const;

 private:
  std::unordered_map<Edge, double, EdgeHash> values_;
};

/// Reads `u v w` lines; `#` starts a comment line.
EdgeWeights read_weights(std::istream& is);

}  // namespace ktlab
