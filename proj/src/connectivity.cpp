#include "ktlab/connectivity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "ktlab/outbox.hpp"

namespace ktlab {

std::optional<Edge> edge_from_name(Word name) {
  const auto u = static_cast<std::uint32_t>(name >> 32);
  const auto v = static_cast<std::uint32_t>(name & 0xffffffffULL);
  if (u == 0 || v == 0 || u >= v) return std::nullopt;
  return Edge(NodeId(u), NodeId(v));
}

SketchParams SketchParams::make(std::size_t n, int copies, std::uint64_t seed) {
  if (copies < 1) throw ParameterError("FindAny needs at least one sketch copy");
  SketchParams p;
  p.copies = copies;
  // Enough levels to thin a cut of up to n(n-1)/2 edges down to one.
  const double pairs = static_cast<double>(n) * static_cast<double>(n > 0 ? n - 1 : 0) / 2.0;
  p.levels = (pairs <= 1 ? 0 : static_cast<int>(std::ceil(std::log2(pairs)))) + 1;
  const auto bits = shared_randomness(seed, 64 * static_cast<std::size_t>(copies + 1));
  p.hash_seeds.assign(bits.begin(), bits.begin() + copies);
  p.fingerprint_seed = bits.back();
  return p;
}

Word SketchParams::fingerprint(Word name) const { return mix64(name ^ fingerprint_seed) | 1; }

int SketchParams::depth(int copy, Word name) const {
  const std::uint64_t h = mix64(name ^ hash_seeds[static_cast<std::size_t>(copy)]);
  return std::min(h == 0 ? 64 : std::countr_zero(h), levels - 1);
}

void CutSketch::add(Word name) {
  const Word fp = p_->fingerprint(name);
  for (int c = 0; c < p_->copies; ++c) {
    const int d = p_->depth(c, name);
    for (int j = 0; j <= d; ++j) {
      auto& s = slots_[index(c, j)];
      s.first ^= name;
      s.second ^= fp;
    }
  }
}

CutSketch& CutSketch::operator^=(const CutSketch& o) {
  for (std::size_t k = 0; k < slots_.size(); ++k) xor_slot(k, o.slots_[k]);
  return *this;
}

bool CutSketch::empty() const {
  for (int c = 0; c < p_->copies; ++c) {
    const auto& s = slots_[index(c, 0)];
    if (s.first != 0 || s.second != 0) return false;
  }
  return true;
}

std::optional<Word> CutSketch::decode() const {
  for (int c = 0; c < p_->copies; ++c)
    for (int j = 0; j < p_->levels; ++j) {
      const auto& s = slots_[index(c, j)];
      if (s.first != 0 && edge_from_name(s.first) && p_->fingerprint(s.first) == s.second) return s.first;
    }
  return std::nullopt;
}

std::uint64_t leader_rank(std::uint64_t seed, std::uint64_t salt, NodeId v) {
  return node_rng(seed, Stream::Leader, v, salt)();
}

namespace {

// ---------------------------------------------------------------- leader election

class LeaderProgram final : public NodeProgram {
 public:
  LeaderProgram(std::vector<NodeId>& hn, TreeNode& out, std::uint64_t rank) : hn_(hn), out_(out), rank_(rank) {}

  void init(NodeContext& ctx) override {
    std::sort(hn_.begin(), hn_.end());
    best_ = {rank_, ctx.self().word()};
    out_ = {ctx.self(), kNoNode};
    for (NodeId w : hn_) ctx.send(w, Tag::Leader, {best_.first, best_.second});
  }

  void on_round(NodeContext& ctx, std::span<const Message> inbox) override {
    using Key = std::pair<Word, Word>;
    Key top = best_;
    for (const Message& m : inbox) {
      learn(m.src);
      top = std::max(top, Key{m.at(0), m.at(1)});
    }
    std::vector<NodeId> to;
    if (top != best_) {
      best_ = top;
      NodeId parent;
      for (const Message& m : inbox)
        if (Key{m.at(0), m.at(1)} == best_ && (!parent.valid() || m.src < parent)) parent = m.src;
      out_ = {NodeId::from_word(best_.second), parent};
      to = hn_;
    }
    // Anyone who told us something smaller than our best gets the best back.
    for (const Message& m : inbox)
      if (Key{m.at(0), m.at(1)} < best_) to.push_back(m.src);
    std::sort(to.begin(), to.end());
    to.erase(std::unique(to.begin(), to.end()), to.end());
    for (NodeId w : to) {
      bool told = false;
      for (const Message& m : inbox) told = told || (m.src == w && Key{m.at(0), m.at(1)} == best_);
      if (!told) ctx.send(w, Tag::Leader, {best_.first, best_.second});
    }
  }

 private:
  void learn(NodeId w) {
    auto it = std::lower_bound(hn_.begin(), hn_.end(), w);
    if (it == hn_.end() || *it != w) hn_.insert(it, w);
  }

  std::vector<NodeId>& hn_;
  TreeNode& out_;
  std::uint64_t rank_;
  std::pair<Word, Word> best_;
};

// ---------------------------------------------------------------- FindAny

class FindProgram final : public NodeProgram {
 public:
  FindProgram(const SketchParams& p, TreeNode me, ComponentFind& result, std::vector<NodeId>& partners)
      : p_(p), me_(me), result_(result), partners_(partners), acc_(p) {}

  void init(NodeContext& ctx) override {
    if (me_.parent.valid()) ctx.send(me_.parent, Tag::ChildNotice);
    for (NodeId w : ctx.view().neighbors()) acc_.add(edge_name(Edge(ctx.self(), w)));
    got_.assign(acc_.size(), 0);
    ctx.stay_awake();
  }

  void on_round(NodeContext& ctx, std::span<const Message> inbox) override {
    if (ctx.round() == 1) {
      for (const Message& m : inbox)
        if (m.tag == Tag::ChildNotice) children_.push_back(m.src);
      std::sort(children_.begin(), children_.end());
      advance_gather(ctx);
    }
    for (const Message& m : inbox) {
      switch (m.tag) {
        case Tag::Sketch: {
          const std::size_t k = pos_[m.src]++;
          acc_.xor_slot(k, {m.at(0), m.at(1)});
          ++got_[k];
          advance_gather(ctx);
          break;
        }
        case Tag::Candidate: on_candidate(ctx, m.at(0)); break;
        case Tag::Probe:
          if (NodeId::from_word(m.at(1)) != me_.leader) {
            partners_.push_back(m.src);
            out_.push(m.src, Tag::Accept, {m.at(0)});
          } else {
            out_.push(m.src, Tag::Reject, {m.at(0)});
          }
          break;
        case Tag::Accept:
          partners_.push_back(m.src);
          offer(m.at(0));
          own_pending_ = false;
          maybe_report(ctx);
          break;
        case Tag::Reject:
          own_pending_ = false;
          maybe_report(ctx);
          break;
        case Tag::Report:
          offer(m.at(0));
          ++reports_;
          maybe_report(ctx);
          break;
        case Tag::Fallback: on_fallback(ctx); break;
        case Tag::Label:
          if (m.at(0) == 1) {
            out_.push(m.src, Tag::Label, {0, me_.leader.word()});
          } else {
            labels_[m.src] = NodeId::from_word(m.at(1));
            if (NodeId::from_word(m.at(1)) != me_.leader) offer(edge_name(Edge(ctx.self(), m.src)));
            --labels_pending_;
            maybe_report(ctx);
          }
          break;
        case Tag::Chosen: on_chosen(ctx, m.at(0)); break;
        case Tag::Connect: partners_.push_back(m.src); break;
        default: break;
      }
    }
    out_.flush(ctx);
  }

 private:
  enum class Phase { Gather, Verify, Fallback, Done };

  bool root() const { return !me_.parent.valid(); }

  void down(Tag tag, std::initializer_list<Word> payload) {
    for (NodeId c : children_) out_.push(c, tag, payload);
  }

  void offer(Word name) {
    if (name != 0 && (best_ == 0 || name < best_)) best_ = name;
  }

  void advance_gather(NodeContext& ctx) {
    while (next_ < acc_.size() && got_[next_] == children_.size()) {
      if (!root()) out_.push(me_.parent, Tag::Sketch, {acc_.slot(next_).first, acc_.slot(next_).second});
      ++next_;
    }
    if (root() && next_ == acc_.size() && phase_ == Phase::Gather) {
      result_.leader = ctx.self();
      if (acc_.empty()) {
        result_.status = FindStatus::None;
        phase_ = Phase::Done;
      } else if (auto name = acc_.decode()) {
        on_candidate(ctx, *name);
      } else {
        on_fallback(ctx);
      }
    }
  }

  void start_phase(Phase ph) {
    phase_ = ph;
    best_ = 0;
    reports_ = 0;
  }

  void on_candidate(NodeContext& ctx, Word name) {
    start_phase(Phase::Verify);
    down(Tag::Candidate, {name});
    const Edge e = *edge_from_name(name);
    const NodeId other = e.u == ctx.self() ? e.v : (e.v == ctx.self() ? e.u : kNoNode);
    auto nb = ctx.view().neighbors();
    if (other.valid() && std::binary_search(nb.begin(), nb.end(), other)) {
      own_pending_ = true;
      out_.push(other, Tag::Probe, {name, me_.leader.word()});
    }
    maybe_report(ctx);
  }

  void on_fallback(NodeContext& ctx) {
    start_phase(Phase::Fallback);
    if (root()) result_.fallback = true;
    down(Tag::Fallback, {});
    labels_pending_ = ctx.view().neighbors().size();
    for (NodeId w : ctx.view().neighbors()) out_.push(w, Tag::Label, {1, me_.leader.word()});
    maybe_report(ctx);
  }

  void on_chosen(NodeContext& ctx, Word name) {
    down(Tag::Chosen, {name});
    const Edge e = *edge_from_name(name);
    for (NodeId other : {e.u == ctx.self() ? e.v : kNoNode, e.v == ctx.self() ? e.u : kNoNode}) {
      auto it = labels_.find(other);
      if (!other.valid() || it == labels_.end() || it->second == me_.leader) continue;
      partners_.push_back(other);
      out_.push(other, Tag::Connect, {name});
    }
    phase_ = Phase::Done;
  }

  void maybe_report(NodeContext& ctx) {
    if (phase_ == Phase::Verify) {
      if (own_pending_ || reports_ < children_.size()) return;
    } else if (phase_ == Phase::Fallback) {
      if (labels_pending_ > 0 || reports_ < children_.size()) return;
    } else {
      return;
    }
    const Phase done = phase_;
    phase_ = Phase::Done;
    if (!root()) {
      out_.push(me_.parent, Tag::Report, {best_});
      return;
    }
    if (best_ != 0) {
      result_.edge = edge_from_name(best_);
      result_.status = done == Phase::Verify ? FindStatus::Sketch : FindStatus::Fallback;
      if (done == Phase::Fallback) on_chosen(ctx, best_);
      return;
    }
    if (done == Phase::Verify) on_fallback(ctx);
    else result_.status = FindStatus::None;
  }

  const SketchParams& p_;
  TreeNode me_;
  ComponentFind& result_;
  std::vector<NodeId>& partners_;
  CutSketch acc_;
  std::vector<std::uint32_t> got_;
  std::map<NodeId, std::size_t> pos_;
  std::size_t next_ = 0;
  std::vector<NodeId> children_;
  Phase phase_ = Phase::Gather;
  Word best_ = 0;
  std::size_t reports_ = 0;
  bool own_pending_ = false;
  std::size_t labels_pending_ = 0;
  std::map<NodeId, NodeId> labels_;
  EdgeQueues out_;
};

}  // namespace

LeaderOutcome elect_leader(const Graph& g, std::vector<std::vector<NodeId>>& h_neighbors, const RunConfig& rc) {
  if (h_neighbors.size() != g.n()) throw ContractError("elect_leader: one neighbor list per node required");
  LeaderOutcome out;
  out.nodes.assign(g.n(), {});
  RunConfig cfg = rc;
  cfg.stream = Stream::Leader;
  out.run = run_programs(g, cfg, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    return std::make_unique<LeaderProgram>(h_neighbors[k], out.nodes[k], leader_rank(rc.seed, rc.salt, g.id(i)));
  });
  return out;
}

FindOutcome find_outgoing(const Graph& g, const std::vector<TreeNode>& tree, const SketchParams& params,
                          const RunConfig& rc) {
  if (tree.size() != g.n()) throw ContractError("find_outgoing: one tree record per node required");
  FindOutcome out;
  out.partners.assign(g.n(), {});
  std::vector<ComponentFind> results(g.n());
  RunConfig cfg = rc;
  cfg.stream = Stream::Sketch;
  out.run = run_programs(g, cfg, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    return std::make_unique<FindProgram>(params, tree[k], results[k], out.partners[k]);
  });
  for (std::size_t i = 0; i < g.n(); ++i)
    if (!tree[i].parent.valid()) {
      results[i].leader = g.id(static_cast<int>(i));
      out.by_leader.emplace(results[i].leader, results[i]);
    }
  return out;
}

}  // namespace ktlab
