#include "ktlab/weights.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace ktlab {

EdgeWeights::EdgeWeights(std::unordered_map<Edge, double, EdgeHash> values) : values_(std::move(values)) {
  std::vector<double> w;
  w.reserve(values_.size());
  for (const auto& [e, x] : values_) w.push_back(x);
  std::sort(w.begin(), w.end());
  if (std::adjacent_find(w.begin(), w.end()) != w.end()) throw ContractError("edge weights must be distinct");
}

EdgeWeights::Key EdgeWeights::key(const Edge& e) const {
  if (values_.empty()) return {0.0, e};
  auto it = values_.find(e);
  if (it == values_.end())
    throw LookupError("no weight for edge {" + std::to_string(e.u.value) + "," + std::to_string(e.v.value) + "}");
  return {it->second, e};
}

void EdgeWeights::require_cover(const Graph& g) const {
  if (values_.empty()) return;
  for (const Edge& e : g.edges()) key(e);
}

EdgeWeights read_weights(std::istream& is) {
  std::unordered_map<Edge, double, EdgeHash> values;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::uint64_t u = 0, v = 0;
    double w = 0;
    if (!(ls >> u >> v >> w) || u == 0 || v == 0 || u > 0xffffffffULL || v > 0xffffffffULL)
      throw IoError("weights: malformed line " + std::to_string(lineno));
    const Edge e(NodeId(static_cast<std::uint32_t>(u)), NodeId(static_cast<std::uint32_t>(v)));
    if (!values.emplace(e, w).second) throw IoError("weights: duplicate edge on line " + std::to_string(lineno));
  }
  return EdgeWeights(std::move(values));
}

}  // namespace ktlab
