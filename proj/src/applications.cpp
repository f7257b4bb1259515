#include "ktlab/applications.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "ktlab/outbox.hpp"

namespace ktlab {

namespace {

std::vector<std::vector<NodeId>> adjacency(const Graph& g, const std::vector<Edge>& h) {
  std::vector<std::vector<NodeId>> a(g.n());
  for (const Edge& e : h) {
    if (!g.has_edge(e.u, e.v)) throw ContractError("danner edge is not an edge of the graph");
    a[static_cast<std::size_t>(g.index(e.u))].push_back(e.v);
    a[static_cast<std::size_t>(g.index(e.v))].push_back(e.u);
  }
  for (auto& v : a) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return a;
}

void accumulate(RunResult& total, const RunResult& r) {
  total.rounds += r.rounds;
  total.messages += r.messages;
  total.sent += r.sent;
  total.received += r.received;
  total.max_inbox = std::max(total.max_inbox, r.max_inbox);
}

class FloodProgram final : public NodeProgram {
 public:
  FloodProgram(const std::vector<NodeId>& nbrs, bool source, char& informed)
      : nbrs_(nbrs), source_(source), informed_(informed) {}

  void init(NodeContext& ctx) override {
    if (!source_) return;
    informed_ = 1;
    for (NodeId w : nbrs_) ctx.send(w, Tag::Flood);
  }

  void on_round(NodeContext& ctx, std::span<const Message> inbox) override {
    if (informed_) return;
    informed_ = 1;
    std::vector<NodeId> heard;
    for (const Message& m : inbox)
      if (m.tag == Tag::Flood) heard.push_back(m.src);
    std::sort(heard.begin(), heard.end());
    for (NodeId w : nbrs_)
      if (!std::binary_search(heard.begin(), heard.end(), w)) ctx.send(w, Tag::Flood);
  }

 private:
  const std::vector<NodeId>& nbrs_;
  bool source_;
  char& informed_;
};

class NoticeProgram final : public NodeProgram {
 public:
  NoticeProgram(NodeId parent, std::vector<NodeId>& children) : parent_(parent), children_(children) {}
  void init(NodeContext& ctx) override {
    if (parent_.valid()) ctx.send(parent_, Tag::ChildNotice);
  }
  void on_round(NodeContext&, std::span<const Message> inbox) override {
    for (const Message& m : inbox)
      if (m.tag == Tag::ChildNotice) children_.push_back(m.src);
    std::sort(children_.begin(), children_.end());
  }

 private:
  NodeId parent_;
  std::vector<NodeId>& children_;
};

// Convergecast of an OR bit over a tree, then broadcast of the result.
class OrProgram final : public NodeProgram {
 public:
  OrProgram(NodeId parent, const std::vector<NodeId>& children, bool bit, char& result)
      : parent_(parent), children_(children), acc_(bit), result_(result) {}

  void init(NodeContext& ctx) override {
    if (children_.empty()) report(ctx);
  }

  void on_round(NodeContext& ctx, std::span<const Message> inbox) override {
    for (const Message& m : inbox) {
      if (m.tag == Tag::Report) {
        acc_ = acc_ || m.at(0) != 0;
        if (++got_ == children_.size()) report(ctx);
      } else if (m.tag == Tag::Done) {
        finish(ctx, m.at(0) != 0);
      }
    }
  }

 private:
  void report(NodeContext& ctx) {
    if (parent_.valid()) ctx.send(parent_, Tag::Report, {acc_ ? 1u : 0u});
    else finish(ctx, acc_);
  }
  void finish(NodeContext& ctx, bool v) {
    result_ = v;
    for (NodeId c : children_) ctx.send(c, Tag::Done, {v ? 1u : 0u});
  }

  NodeId parent_;
  const std::vector<NodeId>& children_;
  bool acc_;
  std::size_t got_ = 0;
  char& result_;
};

using Key = EdgeWeights::Key;

// One weighted Boruvka step for every active fragment: label exchange with all
// G-neighbors, convergecast of the lightest outgoing edge, broadcast of the
// choice and a Connect over the chosen edge.
class LightestProgram final : public NodeProgram {
 public:
  struct Out {
    std::vector<NodeId> partners;
    bool found = false;  // at fragment roots
  };

  LightestProgram(TreeNode tree, bool active, const EdgeWeights& w, Out& out)
      : tree_(tree), active_(active), w_(w), out_(out) {}

  void init(NodeContext& ctx) override {
    if (!active_) return;
    for (NodeId x : ctx.view().neighbors())
      ctx.send(x, Tag::Label, {tree_.leader.word(), x == tree_.parent ? 1u : 0u});
    ctx.stay_awake();
  }

  void on_round(NodeContext& ctx, std::span<const Message> inbox) override {
    if (!active_) return;
    if (ctx.round() == 1) {
      for (const Message& m : inbox) {
        if (m.tag != Tag::Label) continue;
        if (m.at(1) != 0) children_.push_back(m.src);
        if (m.id_at(0) != tree_.leader) offer(w_.key(Edge(ctx.self(), m.src)));
      }
      if (children_.empty()) report(ctx);
    }
    for (const Message& m : inbox) {
      switch (m.tag) {
        case Tag::Report:
          if (m.at(0) != 0) offer(Key{std::bit_cast<double>(m.at(1)), *edge_from_name(m.at(0))});
          if (++got_ == children_.size()) report(ctx);
          break;
        case Tag::Chosen: choose(ctx, m.at(0)); break;
        case Tag::Connect: out_.partners.push_back(m.src); break;
        default: break;
      }
    }
    out_q_.flush(ctx);
  }

 private:
  void offer(const Key& k) {
    if (!best_ || k < *best_) best_ = k;
  }

  void report(NodeContext& ctx) {
    if (tree_.parent.valid()) {
      if (best_) out_q_.push(tree_.parent, Tag::Report, {edge_name(best_->second), std::bit_cast<Word>(best_->first)});
      else out_q_.push(tree_.parent, Tag::Report, {0, 0});
      return;
    }
    out_.found = best_.has_value();
    if (best_) choose(ctx, edge_name(best_->second));
  }

  void choose(NodeContext& ctx, Word name) {
    for (NodeId c : children_) out_q_.push(c, Tag::Chosen, {name});
    const Edge e = *edge_from_name(name);
    if (e.u == ctx.self() || e.v == ctx.self()) {
      const NodeId other = e.u == ctx.self() ? e.v : e.u;
      out_q_.push(other, Tag::Connect);
      out_.partners.push_back(other);
    }
  }

  TreeNode tree_;
  bool active_;
  const EdgeWeights& w_;
  Out& out_;
  std::vector<NodeId> children_;
  std::size_t got_ = 0;
  std::optional<Key> best_;
  EdgeQueues out_q_;
};

}  // namespace

BroadcastResult broadcast(const Graph& g, const std::vector<Edge>& h, NodeId source, const RunConfig& rc) {
  const int s = g.index(source);
  const auto adj = adjacency(g, h);
  BroadcastResult r;
  r.informed.assign(g.n(), 0);
  r.run = run_programs(g, rc, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    return std::make_unique<FloodProgram>(adj[k], i == s, r.informed[k]);
  });
  r.informed_count = static_cast<std::size_t>(std::count(r.informed.begin(), r.informed.end(), 1));
  return r;
}

SpanningTree spanning_tree(const Graph& g, const std::vector<Edge>& h, const RunConfig& rc) {
  auto adj = adjacency(g, h);
  LeaderOutcome lo = elect_leader(g, adj, rc);
  SpanningTree t;
  t.nodes = std::move(lo.nodes);
  t.run = lo.run;
  t.children.assign(g.n(), {});
  auto notice = run_programs(g, rc, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    return std::make_unique<NoticeProgram>(t.nodes[k].parent, t.children[k]);
  });
  accumulate(t.run, notice);
  for (std::size_t i = 0; i < g.n(); ++i)
    if (t.nodes[i].parent.valid()) t.edges.emplace_back(g.id(static_cast<int>(i)), t.nodes[i].parent);
  std::sort(t.edges.begin(), t.edges.end());
  return t;
}

LeaderResult global_leader_election(const Graph& g, const std::vector<Edge>& h, const RunConfig& rc) {
  auto adj = adjacency(g, h);
  LeaderOutcome lo = elect_leader(g, adj, rc);
  LeaderResult r;
  r.run = lo.run;
  for (const TreeNode& t : lo.nodes) r.leader.push_back(t.leader);
  return r;
}

MstResult mst(const Graph& g, const EdgeWeights& weights, const DannerConfig& cfg) {
  if (!(cfg.delta >= 0.0 && cfg.delta <= 0.25)) throw ParameterError("mst needs delta in [0, 1/4]");
  weights.require_cover(g);
  MstResult r;
  const Danner d = build_danner(g, cfg);
  r.metrics.add("danner", d.state.metrics.rounds(), d.state.metrics.messages());
  r.metrics.fallback_events = d.state.metrics.fallback_events;
  r.metrics.max_inbox = d.state.metrics.max_inbox;

  RunConfig rc;
  rc.rho = cfg.rho;
  rc.round_cap = cfg.round_cap;
  rc.audit = cfg.audit;
  rc.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(Stream::Leader), 0x6d7374});
  const SpanningTree st = spanning_tree(g, d.edges(), rc);
  r.metrics.add("spanning-tree", st.run);

  const std::size_t n = g.n();
  std::vector<std::vector<NodeId>> frag(n);
  std::vector<char> active(n, 1);
  RunResult merge_cost;
  std::set<Edge> chosen;
  while (std::find(active.begin(), active.end(), 1) != active.end()) {
    if (r.iterations > static_cast<int>(n) + 1) throw NonTerminationError("mst: fragments stopped merging");
    rc.salt = static_cast<std::uint64_t>(r.iterations) + 1;
    LeaderOutcome fl = elect_leader(g, frag, rc);
    accumulate(merge_cost, fl.run);
    std::vector<LightestProgram::Out> outs(n);
    accumulate(merge_cost, run_programs(g, rc, [&](int i) {
                 const auto k = static_cast<std::size_t>(i);
                 return std::make_unique<LightestProgram>(fl.nodes[k], active[k] != 0, weights, outs[k]);
               }));
    std::vector<char> cont(n, 0);
    accumulate(merge_cost, run_programs(g, rc, [&](int i) {
                 const auto k = static_cast<std::size_t>(i);
                 return std::make_unique<OrProgram>(st.nodes[k].parent, st.children[k], outs[k].found,
                                                    cont[k]);
               }));
    for (std::size_t i = 0; i < n; ++i) {
      const NodeId v = g.id(static_cast<int>(i));
      for (NodeId w : outs[i].partners) {
        frag[i].push_back(w);
        chosen.insert(Edge(v, w));
      }
      std::sort(frag[i].begin(), frag[i].end());
      frag[i].erase(std::unique(frag[i].begin(), frag[i].end()), frag[i].end());
      active[i] = cont[i];
    }
    ++r.iterations;
  }
  r.metrics.add("mst-merge", merge_cost);
  r.edges.assign(chosen.begin(), chosen.end());
  return r;
}

}  // namespace ktlab
