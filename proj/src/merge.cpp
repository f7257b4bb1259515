#include "ktlab/merge.hpp"

#include <algorithm>
#include <cmath>

namespace ktlab {

int merge_iterations(std::size_t n) {
  return n <= 1 ? 0 : static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
}

std::uint64_t merge_barrier(std::size_t n, double delta, double c_sync) {
  if (n <= 1) return 1;
  const double lg = std::log2(static_cast<double>(n));
  const double r = c_sync * std::pow(static_cast<double>(n), 1.0 - 2.0 * delta) * lg * lg;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(r - 1e-9)));
}

namespace {

// Component label per dense index for the current H.
std::vector<int> h_labels(const Graph& g, const std::map<Edge, Prov>& h) {
  std::vector<int> parent(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& [e, p] : h) {
    const int a = find(g.index(e.u)), b = find(g.index(e.v));
    if (a != b) parent[static_cast<std::size_t>(a)] = b;
  }
  std::vector<int> lab(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) lab[i] = find(static_cast<int>(i));
  return lab;
}

bool mergeable(const Graph& g, const std::vector<int>& lab) {
  for (const Edge& e : g.edges())
    if (lab[static_cast<std::size_t>(g.index(e.u))] != lab[static_cast<std::size_t>(g.index(e.v))]) return true;
  return false;
}

std::size_t count_labels(std::vector<int> lab) {
  std::sort(lab.begin(), lab.end());
  return static_cast<std::size_t>(std::unique(lab.begin(), lab.end()) - lab.begin());
}

}  // namespace

void cluster_merge(const Graph& g, DannerState& st, const DannerConfig& cfg) {
  const std::size_t n = g.n();
  auto& ms = st.merge;
  ms = MergeStats{};
  ms.r_iter = merge_barrier(n, cfg.delta, cfg.c_sync);

  // Incident H-edges each node recorded itself.
  std::vector<std::vector<NodeId>> hn(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = g.id(static_cast<int>(i));
    const auto& mem = st.memory[i];
    for (const auto& [e, p] : mem.h) {
      if (e.u == v) hn[i].push_back(e.v);
      else if (e.v == v) hn[i].push_back(e.u);
    }
    for (auto [c, sender] : mem.grown) hn[i].push_back(sender);
    std::sort(hn[i].begin(), hn[i].end());
    hn[i].erase(std::unique(hn[i].begin(), hn[i].end()), hn[i].end());
  }

  RunConfig rc;
  rc.rho = cfg.rho;
  rc.round_cap = cfg.round_cap;
  rc.audit = cfg.audit;
  rc.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(Stream::Merge)});

  const int planned = merge_iterations(n);
  for (int it = 0;; ++it) {
    const auto before = h_labels(g, st.H);
    ms.components.push_back(count_labels(before));
    if (it >= planned) {
      if (!mergeable(g, before) || it >= planned + static_cast<int>(n)) break;
      ++ms.extra_iterations;
      st.metrics.fallback_events.push_back({"merge", kNoNode, "extra iteration " + std::to_string(it + 1)});
    }
    ++ms.iterations;
    rc.salt = static_cast<std::uint64_t>(it);
    const LeaderOutcome leaders = elect_leader(g, hn, rc);
    const SketchParams params =
        SketchParams::make(n, cfg.c_findany, derive_seed(cfg.seed, {static_cast<std::uint64_t>(Stream::Sketch),
                                                                    static_cast<std::uint64_t>(it)}));
    const FindOutcome found = find_outgoing(g, leaders.nodes, params, rc);

    for (std::size_t i = 0; i < n; ++i) {
      const NodeId v = g.id(static_cast<int>(i));
      for (NodeId w : found.partners[i]) {
        auto pos = std::lower_bound(hn[i].begin(), hn[i].end(), w);
        if (pos == hn[i].end() || *pos != w) hn[i].insert(pos, w);
        st.memory[i].merge_partners.push_back(w);
        const Edge e(v, w);
        if (st.H.emplace(e, Prov::Merge).second) {
          ++ms.edges_added;
          if (before[i] == before[static_cast<std::size_t>(g.index(w))]) ++ms.intra_component_additions;
        }
      }
    }
    for (const auto& [leader, cf] : found.by_leader) {
      if (!cf.fallback) continue;
      ++ms.sketch_fallbacks;
      st.metrics.fallback_events.push_back({"merge", leader, "sketch did not yield a verified outgoing edge"});
    }
    const std::uint64_t eager = leaders.run.rounds + found.run.rounds;
    ms.eager_rounds += eager;
    ms.barrier_rounds += std::max(ms.r_iter, eager);
    ms.messages += leaders.run.messages + found.run.messages;
    st.metrics.max_inbox = std::max({st.metrics.max_inbox, leaders.run.max_inbox, found.run.max_inbox});
  }
  st.metrics.add("merge", ms.barrier_rounds, ms.messages);
}

}  // namespace ktlab
