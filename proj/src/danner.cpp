#include "ktlab/danner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ktlab/merge.hpp"

namespace ktlab {

const char* to_string(Prov p) {
  switch (p) {
    case Prov::Phase1Join: return "phase1-join";
    case Prov::Phase1Dump: return "phase1-dump";
    case Prov::Phase2Join: return "phase2-join";
    case Prov::Phase2LowDeg: return "phase2-lowdeg";
    case Prov::Merge: return "merge";
  }
  return "?";
}

Prov prov_from_string(const std::string& s) {
  for (Prov p : {Prov::Phase1Join, Prov::Phase1Dump, Prov::Phase2Join, Prov::Phase2LowDeg, Prov::Merge})
    if (s == to_string(p)) return p;
  throw SchemaError("unknown provenance tag '" + s + "'");
}

double sample_probability(std::size_t n, double delta) { return std::pow(static_cast<double>(n), -delta); }

std::uint64_t rank_threshold(std::size_t n, double delta) {
  // Guard against pow rounding just above an integer.
  const double x = std::pow(static_cast<double>(n), 2 * delta);
  const double r = std::round(x);
  return static_cast<std::uint64_t>(std::abs(x - r) < 1e-9 ? r : std::ceil(x));
}

double high_degree_threshold(std::size_t n, double delta) {
  return 0.5 * std::pow(static_cast<double>(n), delta) * std::log(static_cast<double>(n));
}

std::size_t DannerState::max_m1() const {
  std::size_t best = 0;
  for (const auto& m : memory) best = std::max(best, m.m1.size());
  return best;
}

namespace {

void check_delta(double delta) {
  if (!(delta >= 0.0 && delta <= 0.5)) throw ParameterError("delta must lie in [0, 1/2]");
}

RunConfig run_config(const DannerConfig& cfg, Stream stream) {
  RunConfig rc;
  rc.rho = cfg.rho;
  rc.round_cap = cfg.round_cap;
  rc.audit = cfg.audit;
  rc.seed = cfg.seed;
  rc.stream = stream;
  return rc;
}

// ---------------------------------------------------------------- phase 1

class Phase1Program final : public NodeProgram {
 public:
  Phase1Program(NodeMemory& mem, double p, std::uint64_t threshold) : mem_(mem), p_(p), threshold_(threshold) {}

  void init(NodeContext& ctx) override {
    mem_.sampled1 = bernoulli(ctx.rng(), p_);
    if (mem_.sampled1) {
      mem_.cluster = ctx.self();
      for (NodeId w : ctx.view().neighbors())
        if (static_cast<std::uint64_t>(rank(ctx.view(), w)) <= threshold_) ctx.send(w, Tag::Msg1, {ctx.self().word()});
    }
    ctx.stay_awake();
  }

  void on_round(NodeContext& ctx, std::span<const Message> inbox) override {
    if (ctx.round() == 1) {
      for (const Message& m : inbox)
        if (m.tag == Tag::Msg1) mem_.m1.emplace_back(m.id_at(0), m.src);
      if (mem_.sampled1) return;
      if (!mem_.m1.empty()) {
        const auto best = *std::min_element(mem_.m1.begin(), mem_.m1.end());
        mem_.cluster = best.first;
        mem_.h.emplace(Edge(best.second, ctx.self()), Prov::Phase1Join);
        ctx.send(best.second, Tag::Join);
      } else {
        mem_.inactive = true;
        for (NodeId w : ctx.view().neighbors()) {
          mem_.h.emplace(Edge(w, ctx.self()), Prov::Phase1Dump);
          ctx.send(w, Tag::Dump);
        }
      }
      return;
    }
    for (const Message& m : inbox) {
      if (m.tag == Tag::Join) {
        mem_.children.push_back(m.src);
        mem_.h.emplace(Edge(m.src, ctx.self()), Prov::Phase1Join);
      } else if (m.tag == Tag::Dump) {
        mem_.h.emplace(Edge(m.src, ctx.self()), Prov::Phase1Dump);
      }
    }
    std::sort(mem_.children.begin(), mem_.children.end());
  }

 private:
  NodeMemory& mem_;
  double p_;
  std::uint64_t threshold_;
};

// Probe / Connect routing shared by both phase-2 variants. Returns true if handled.
bool route_common(NodeContext& ctx, const Message& m, NodeMemory& mem, EdgeQueues& out) {
  switch (m.tag) {
    case Tag::Probe: {
      const NodeId target = m.id_at(0);
      if (target == ctx.self()) out.push(m.src, Tag::Reply, {ctx.self().word(), mem.sampled2 ? 1u : 0u});
      else out.push(target, Tag::Probe, {target.word()});
      return true;
    }
    case Tag::Reply:
      // Members relay replies to their center; centers consume them elsewhere.
      if (mem.cluster != ctx.self()) out.push(mem.cluster, Tag::Reply, {m.at(0), m.at(1)});
      return mem.cluster != ctx.self();
    case Tag::Connect: {
      const NodeId target = m.id_at(0);
      if (target == ctx.self()) {
        mem.h.emplace(Edge(m.src, ctx.self()), Prov::Phase2Join);
      } else {
        mem.h.emplace(Edge(ctx.self(), target), Prov::Phase2Join);
        out.push(target, Tag::Connect, {target.word()});
      }
      return true;
    }
    default: return false;
  }
}

void adopt_grown_edges(NodeContext&, const GrowAgent& agent, NodeMemory& mem) { mem.grown = agent.adopted(); }

// ---------------------------------------------------------------- phase 2, high delta

class Phase2HighProgram final : public NodeProgram {
 public:
  Phase2HighProgram(NodeMemory& mem, double p) : mem_(mem), p_(p) {}

  void init(NodeContext& ctx) override {
    if (is_center()) {
      mem_.sampled2 = bernoulli(ctx.rng(), p_);
      if (mem_.sampled2) {
        mem_.kind = NodeMemory::Kind::Sampled;
        for (NodeId w : ctx.view().neighbors()) ctx.send(w, Tag::Msg2, {ctx.self().word()});
      } else {
        ctx.stay_awake();
      }
    }
  }

  void on_round(NodeContext& ctx, std::span<const Message> inbox) override {
    const auto r = ctx.round();
    if (r == 1) {
      std::map<NodeId, NodeId> relay;  // target -> smallest center relayed to it
      for (const Message& m : inbox) {
        if (m.tag != Tag::Msg2) continue;
        direct_.push_back(m.id_at(0));
        for (NodeId x : ctx.view().neighbors()) {
          if (!d2_forwards(ctx.view(), m.src, x)) continue;
          auto [it, fresh] = relay.emplace(x, m.src);
          if (!fresh && m.src < it->second) it->second = m.src;
        }
      }
      for (auto [x, s] : relay) ctx.send(x, Tag::Msg2, {s.word()});
      if (is_child() && !direct_.empty()) ctx.stay_awake();
      if (is_center() && !mem_.sampled2) ctx.stay_awake();
      return;
    }
    if (r == 2) {
      for (const Message& m : inbox)
        if (m.tag == Tag::Msg2) relayed_.emplace_back(m.id_at(0), m.src);
      if (is_child() && !direct_.empty() &&
          std::find(direct_.begin(), direct_.end(), mem_.cluster) == direct_.end())
        ctx.send(mem_.cluster, Tag::Msg3, {std::min_element(direct_.begin(), direct_.end())->word()});
      if (is_center() && !mem_.sampled2) ctx.stay_awake();
      return;
    }
    if (r == 3 && is_center() && !mem_.sampled2) {
      for (const Message& m : inbox)
        if (m.tag == Tag::Msg3) via_child_.emplace_back(m.id_at(0), m.src);
      decide(ctx);
    }
    for (const Message& m : inbox) {
      if (m.tag == Tag::Msg3 || m.tag == Tag::Msg2) continue;
      if (grow_.handle(ctx, m, mem_.cluster, out_)) continue;
      route_common(ctx, m, mem_, out_);
    }
    adopt_grown_edges(ctx, grow_, mem_);
    out_.flush(ctx);
  }

 private:
  bool is_center() const { return mem_.sampled1; }
  bool is_child() const { return !mem_.sampled1 && !mem_.inactive && mem_.cluster.valid(); }

  void decide(NodeContext& ctx) {
    // Candidates ordered by (cluster ID, route kind, via).
    struct Cand {
      NodeId s;
      int kind;  // 0 direct, 1 via child, 2 via relay
      NodeId via;
      auto operator<=>(const Cand&) const = default;
    };
    std::optional<Cand> best;
    auto offer = [&](Cand c) {
      if (!best || c < *best) best = c;
    };
    for (NodeId s : direct_) offer({s, 0, s});
    for (auto [s, w] : via_child_) offer({s, 1, w});
    for (auto [s, x] : relayed_) offer({s, 2, x});

    const NodeId c = ctx.self();
    if (!best) {
      mem_.kind = NodeMemory::Kind::LowDegree;
      std::vector<NodeId> members = mem_.children;
      members.push_back(c);
      grow_.start(ctx, members, out_);
      return;
    }
    mem_.kind = NodeMemory::Kind::HighDegree;
    mem_.joined_to = best->s;
    if (best->kind == 0) {
      mem_.join_path = {Edge(c, best->s)};
      mem_.h.emplace(Edge(c, best->s), Prov::Phase2Join);
      out_.push(best->s, Tag::Connect, {best->s.word()});
    } else if (best->kind == 1) {
      mem_.join_path = {Edge(best->via, best->s)};
      out_.push(best->via, Tag::Connect, {best->s.word()});
    } else {
      mem_.join_path = {Edge(c, best->via), Edge(best->via, best->s)};
      mem_.h.emplace(Edge(c, best->via), Prov::Phase2Join);
      mem_.h.emplace(Edge(best->via, best->s), Prov::Phase2Join);
      out_.push(best->via, Tag::Connect, {best->s.word()});
    }
  }

  NodeMemory& mem_;
  double p_;
  std::vector<NodeId> direct_;
  std::vector<std::pair<NodeId, NodeId>> relayed_;    // (S, relay)
  std::vector<std::pair<NodeId, NodeId>> via_child_;  // (S, child)
  GrowAgent grow_;
  EdgeQueues out_;
};

// ---------------------------------------------------------------- phase 2, low delta

class Phase2LowProgram final : public NodeProgram {
 public:
  Phase2LowProgram(NodeMemory& mem, double p, double threshold) : mem_(mem), p_(p), threshold_(threshold) {}

  void init(NodeContext& ctx) override {
    if (!is_center()) return;
    mem_.sampled2 = bernoulli(ctx.rng(), p_);
    for (NodeId w : mem_.children) out_.push(w, Tag::Status, {mem_.sampled2 ? 1u : 0u});
    if (mem_.sampled2) {
      mem_.kind = NodeMemory::Kind::Sampled;
    } else {
      for (auto [s, sender] : mem_.m1) collect(s, ctx.self());
      if (mem_.children.empty()) classify(ctx);
    }
    out_.flush(ctx);
  }

  void on_round(NodeContext& ctx, std::span<const Message> inbox) override {
    for (const Message& m : inbox) {
      switch (m.tag) {
        case Tag::Status:
          if (m.at(0) == 0) upstream();
          break;
        case Tag::Upstream:
          if (m.id_at(0).valid()) collect(m.id_at(0), m.src);
          if (m.at(1) == 1 && ++finished_ == mem_.children.size()) classify(ctx);
          break;
        case Tag::Reply:
          if (is_center() && !mem_.sampled2) {
            on_reply(ctx, m.id_at(0), m.at(1) == 1);
            break;
          }
          [[fallthrough]];
        default:
          if (grow_.handle(ctx, m, mem_.cluster, out_)) break;
          route_common(ctx, m, mem_, out_);
      }
    }
    adopt_grown_edges(ctx, grow_, mem_);
    out_.flush(ctx);
  }

 private:
  bool is_center() const { return mem_.sampled1; }

  void upstream() {
    std::vector<std::pair<NodeId, NodeId>> items;
    for (auto e : mem_.m1)
      if (e.first != mem_.cluster) items.push_back(e);
    if (items.empty()) {
      out_.push(mem_.cluster, Tag::Upstream, {0, 1});
      return;
    }
    for (std::size_t i = 0; i < items.size(); ++i)
      out_.push(mem_.cluster, Tag::Upstream, {items[i].first.word(), i + 1 == items.size() ? 1u : 0u});
  }

  void collect(NodeId s, NodeId member) {
    if (s == mem_.cluster) return;
    auto [it, fresh] = m1c_.emplace(s, member);
    if (!fresh && member < it->second) it->second = member;
  }

  void classify(NodeContext& ctx) {
    mem_.m1_cluster = m1c_.size();
    const auto x = static_cast<std::size_t>(std::floor(threshold_));
    if (static_cast<double>(m1c_.size()) >= threshold_ && x >= 1) {
      mem_.kind = NodeMemory::Kind::HighDegree;
      for (auto it = m1c_.begin(); it != m1c_.end() && probes_.size() < x; ++it) {
        probes_.emplace(it->first, it->second);
        out_.push(it->second == ctx.self() ? it->first : it->second, Tag::Probe, {it->first.word()});
      }
      return;
    }
    grow(ctx);
  }

  void grow(NodeContext& ctx) {
    mem_.kind = NodeMemory::Kind::LowDegree;
    std::vector<NodeId> members = mem_.children;
    members.push_back(ctx.self());
    grow_.start(ctx, members, out_);
  }

  void on_reply(NodeContext& ctx, NodeId s, bool sampled) {
    if (sampled) hits_.push_back(s);
    if (++replies_ < probes_.size()) return;
    if (hits_.empty()) {
      mem_.fallback = true;
      grow(ctx);
      return;
    }
    const NodeId best = *std::min_element(hits_.begin(), hits_.end());
    const NodeId w = probes_.at(best);
    mem_.joined_to = best;
    mem_.join_path = {Edge(w, best)};
    if (w == ctx.self()) mem_.h.emplace(Edge(w, best), Prov::Phase2Join);
    out_.push(w == ctx.self() ? best : w, Tag::Connect, {best.word()});
  }

  NodeMemory& mem_;
  double p_;
  double threshold_;
  std::map<NodeId, NodeId> m1c_;     // M1(C): cluster ID -> smallest member that heard it
  std::size_t finished_ = 0;
  std::map<NodeId, NodeId> probes_;  // probed cluster -> member on the edge
  std::size_t replies_ = 0;
  std::vector<NodeId> hits_;
  GrowAgent grow_;
  EdgeQueues out_;
};

template <class Make>
RunResult run_phase(const Graph& g, const RunConfig& rc, Make make) {
  return run_programs(g, rc, [&](int i) { return make(static_cast<std::size_t>(i)); });
}

void collect_h(const Graph& g, DannerState& st) {
  for (std::size_t i = 0; i < g.n(); ++i) {
    const auto& mem = st.memory[i];
    for (const auto& [e, p] : mem.h) st.H.emplace(e, p);
    for (auto [c, sender] : mem.grown) st.H.emplace(Edge(sender, g.id(static_cast<int>(i))), Prov::Phase2LowDeg);
  }
}

void assemble_c2(const Graph& g, DannerState& st) {
  st.c2.clear();
  st.high_degree.clear();
  st.low_degree.clear();
  for (std::size_t i = 0; i < g.n(); ++i) {
    const auto& mem = st.memory[i];
    if (!mem.sampled1 || !mem.sampled2) continue;
    st.c2.emplace(mem.cluster, st.c1.at(mem.cluster));
  }
  for (std::size_t i = 0; i < g.n(); ++i) {
    const auto& mem = st.memory[i];
    if (!mem.sampled1 || mem.sampled2) continue;
    const NodeId c = g.id(static_cast<int>(i));
    if (mem.kind == NodeMemory::Kind::HighDegree && mem.joined_to.valid()) {
      st.high_degree.push_back(c);
      auto& target = st.c2.at(mem.joined_to);
      const auto& mine = st.c1.at(c);
      target.members.insert(target.members.end(), mine.members.begin(), mine.members.end());
      target.tree_edges.insert(target.tree_edges.end(), mine.tree_edges.begin(), mine.tree_edges.end());
      target.tree_edges.insert(target.tree_edges.end(), mem.join_path.begin(), mem.join_path.end());
    } else {
      st.low_degree.push_back(c);
    }
  }
  for (auto& [id, cl] : st.c2) {
    std::sort(cl.members.begin(), cl.members.end());
    std::sort(cl.tree_edges.begin(), cl.tree_edges.end());
    cl.tree_edges.erase(std::unique(cl.tree_edges.begin(), cl.tree_edges.end()), cl.tree_edges.end());
  }
}

void log_fallbacks(const Graph& g, DannerState& st) {
  for (std::size_t i = 0; i < g.n(); ++i)
    if (st.memory[i].fallback)
      st.metrics.fallback_events.push_back(
          {"phase2", g.id(static_cast<int>(i)), "no sampled cluster among probed receipts"});
}

}  // namespace

DannerState phase1(const Graph& g, const DannerConfig& cfg) {
  check_delta(cfg.delta);
  DannerState st;
  st.delta = cfg.delta;
  st.n = g.n();
  st.memory.assign(g.n(), {});
  const double p = sample_probability(g.n(), cfg.delta);
  const auto thr = rank_threshold(g.n(), cfg.delta);
  auto res = run_phase(g, run_config(cfg, Stream::Phase1),
                       [&](std::size_t i) { return std::make_unique<Phase1Program>(st.memory[i], p, thr); });
  st.metrics.add("phase1", res);
  collect_h(g, st);
  for (std::size_t i = 0; i < g.n(); ++i) {
    const auto& mem = st.memory[i];
    const NodeId v = g.id(static_cast<int>(i));
    if (mem.inactive) st.inactive.push_back(v);
    if (!mem.sampled1) continue;
    ClusterRecord cr;
    cr.id = v;
    cr.members = mem.children;
    cr.members.push_back(v);
    std::sort(cr.members.begin(), cr.members.end());
    for (NodeId w : mem.children) cr.tree_edges.emplace_back(v, w);
    st.c1.emplace(v, std::move(cr));
  }
  std::sort(st.inactive.begin(), st.inactive.end());
  return st;
}

void phase2_high(const Graph& g, DannerState& st, const DannerConfig& cfg) {
  if (!(cfg.delta > 1.0 / 3.0 && cfg.delta <= 0.5)) throw ParameterError("phase2_high needs delta in (1/3, 1/2]");
  const double p = sample_probability(g.n(), cfg.delta);
  auto res = run_phase(g, run_config(cfg, Stream::Phase2),
                       [&](std::size_t i) { return std::make_unique<Phase2HighProgram>(st.memory[i], p); });
  st.metrics.add("phase2", res);
  collect_h(g, st);
  assemble_c2(g, st);
}

void phase2_low(const Graph& g, DannerState& st, const DannerConfig& cfg) {
  if (!(cfg.delta >= 0.0 && cfg.delta <= 1.0 / 3.0)) throw ParameterError("phase2_low needs delta in [0, 1/3]");
  const double p = sample_probability(g.n(), cfg.delta);
  const double thr = high_degree_threshold(g.n(), cfg.delta);
  auto res = run_phase(g, run_config(cfg, Stream::Phase2),
                       [&](std::size_t i) { return std::make_unique<Phase2LowProgram>(st.memory[i], p, thr); });
  st.metrics.add("phase2", res);
  collect_h(g, st);
  assemble_c2(g, st);
  log_fallbacks(g, st);
}

std::vector<Edge> Danner::edges() const {
  std::vector<Edge> out;
  out.reserve(state.H.size());
  for (const auto& [e, p] : state.H) out.push_back(e);
  return out;
}

Graph Danner::subgraph(const Graph& g) const { return edge_subgraph(g, edges()); }

Danner build_danner(const Graph& g, const DannerConfig& cfg) {
  check_delta(cfg.delta);
  if (cfg.rho < 2) throw ParameterError("the danner pipeline needs rho >= 2");
  Danner d;
  d.state = phase1(g, cfg);
  if (cfg.delta > 1.0 / 3.0) phase2_high(g, d.state, cfg);
  else phase2_low(g, d.state, cfg);
  cluster_merge(g, d.state, cfg);
  return d;
}

void write_danner(std::ostream& os, const DannerState& st) {
  for (const auto& [e, p] : st.H) os << e.u.value << ' ' << e.v.value << ' ' << to_string(p) << '\n';
}

std::map<Edge, Prov> read_danner(std::istream& is) {
  std::map<Edge, Prov> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::uint32_t u = 0, v = 0;
    std::string tag;
    if (!(ls >> u >> v >> tag) || u == 0 || v == 0 || u == v)
      throw SchemaError("danner file: bad line " + std::to_string(lineno));
    out.emplace(Edge(NodeId(u), NodeId(v)), prov_from_string(tag));
  }
  return out;
}

int tree_diameter(const std::vector<Edge>& edges) {
  if (edges.empty()) return 0;
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const Edge& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  auto far = [&](NodeId s) {
    std::map<NodeId, int> dist{{s, 0}};
    std::vector<NodeId> q{s};
    std::pair<int, NodeId> best{0, s};
    for (std::size_t h = 0; h < q.size(); ++h) {
      const NodeId x = q[h];
      for (NodeId y : adj[x]) {
        if (dist.count(y)) continue;
        dist[y] = dist[x] + 1;
        best = std::max(best, {dist[y], y});
        q.push_back(y);
      }
    }
    return best;
  };
  return far(far(adj.begin()->first).second).first;
}

}  // namespace ktlab
