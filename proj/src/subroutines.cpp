#include "ktlab/subroutines.hpp"

#include <algorithm>
#include <string>

namespace ktlab {

int rank(const LocalView& view, NodeId w) {
  auto own = view.neighbors();
  if (!std::binary_search(own.begin(), own.end(), w)) {
    throw ContractError("rank: " + std::to_string(view.self().value) + " is not a neighbor of " +
                        std::to_string(w.value));
  }
  auto nb = view.neighbors_of(w);
  return static_cast<int>(std::lower_bound(nb.begin(), nb.end(), view.self()) - nb.begin()) + 1;
}

bool d2_forwards(const LocalView& view, NodeId root, NodeId x) {
  if (x == root || x == view.self()) return false;
  auto rn = view.neighbors_of(root);
  if (std::binary_search(rn.begin(), rn.end(), x)) return false;
  auto xn = view.neighbors_of(x);
  // Smallest common neighbor of root and x.
  auto a = rn.begin();
  auto b = xn.begin();
  while (a != rn.end() && b != xn.end()) {
    if (*a < *b) ++a;
    else if (*b < *a) ++b;
    else return *a == view.self();
  }
  return false;
}

namespace {

class D2Program final : public NodeProgram {
 public:
  D2Program(NodeId root, std::optional<NodeId>* parent) : root_(root), parent_(parent) {}

  void init(NodeContext& ctx) override {
    if (ctx.self() != root_) return;
    for (NodeId w : ctx.view().neighbors()) ctx.send(w, Tag::Msg2, {root_.word()});
  }

  void on_round(NodeContext& ctx, std::span<const Message> inbox) override {
    for (const Message& m : inbox) {
      if (m.tag != Tag::Msg2 || ctx.self() == root_ || parent_->has_value()) continue;
      *parent_ = m.src;
      if (m.src != root_) continue;
      for (NodeId x : ctx.view().neighbors())
        if (d2_forwards(ctx.view(), root_, x)) ctx.send(x, Tag::Msg2, {root_.word()});
    }
  }

 private:
  NodeId root_;
  std::optional<NodeId>* parent_;
};

}  // namespace

D2Result build_d2_bfs_tree(const Graph& g, NodeId root, RunConfig config) {
  g.index(root);
  std::vector<std::optional<NodeId>> parent(g.n());
  D2Result r;
  r.run = run_programs(g, config, [&](int i) {
    return std::make_unique<D2Program>(root, &parent[static_cast<std::size_t>(i)]);
  });
  r.tree.root = root;
  for (std::size_t i = 0; i < g.n(); ++i)
    if (parent[i]) r.tree.edges.emplace_back(*parent[i], g.id(static_cast<int>(i)));
  std::sort(r.tree.edges.begin(), r.tree.edges.end());
  return r;
}

GrowPlan plan_grow_cluster(const LocalView& view, std::span<const NodeId> members) {
  std::vector<NodeId> c(members.begin(), members.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  if (!std::binary_search(c.begin(), c.end(), view.self()))
    throw ContractError("grow_cluster: center must belong to its cluster");
  for (NodeId u : c) {
    if (u != view.self() && !view.adjacent(view.self(), u))
      throw ContractError("grow_cluster: member " + std::to_string(u.value) + " is not adjacent to the center");
  }
  GrowPlan plan;
  // Members in ascending order, so the first claim on x is the smallest ID.
  for (NodeId u : c) {
    auto nb = u == view.self() ? view.neighbors() : view.neighbors_of(u);
    for (NodeId x : nb) {
      if (std::binary_search(c.begin(), c.end(), x)) continue;
      if (plan.parent.emplace(x, u).second) plan.children[u].push_back(x);
    }
  }
  plan.N = plan.parent.size();
  for (NodeId u : c) {
    if (u == view.self()) continue;
    auto it = plan.children.find(u);
    const std::size_t k = it == plan.children.end() ? 0 : it->second.size();
    (k * k <= plan.N ? plan.ldc : plan.hdc).push_back(u);
  }
  return plan;
}

void GrowAgent::start(NodeContext& ctx, std::span<const NodeId> members, EdgeQueues& out) {
  plan_ = plan_grow_cluster(ctx.view(), members);
  const GrowPlan& p = *plan_;
  if (auto it = p.children.find(ctx.self()); it != p.children.end())
    for (NodeId x : it->second) out.push(x, Tag::GrowEdge, {ctx.self().word()});
  for (NodeId u : p.ldc) {
    auto it = p.children.find(u);
    if (it == p.children.end()) continue;
    const auto& list = it->second;
    for (std::size_t k = 0; k < list.size(); ++k) out.push(u, Tag::GrowList, {list[k].word(), list.size() - 1 - k});
  }
  for (NodeId u : p.hdc)
    for (std::size_t k = 0; k < p.hdc.size(); ++k)
      out.push(u, Tag::GrowList, {p.hdc[k].word(), p.hdc.size() - 1 - k});
}

bool GrowAgent::handle(NodeContext& ctx, const Message& m, NodeId own_cluster, EdgeQueues& out) {
  if (m.tag == Tag::GrowEdge) {
    const NodeId c = m.id_at(0);
    if (c == own_cluster) return true;  // already inside the cluster
    auto [it, fresh] = adopted_.emplace(c, m.src);
    if (!fresh && m.src < it->second) it->second = m.src;
    return true;
  }
  if (m.tag != Tag::GrowList) return false;
  list_from_ = m.src;
  list_.push_back(m.id_at(0));
  if (m.at(1) != 0) return true;

  const NodeId center = list_from_;
  const bool high = std::find(list_.begin(), list_.end(), ctx.self()) != list_.end();
  if (!high) {
    for (NodeId x : list_) out.push(x, Tag::GrowEdge, {center.word()});
  } else {
    std::vector<NodeId> hdc = list_;
    std::sort(hdc.begin(), hdc.end());
    for (NodeId v : ctx.view().neighbors()) {
      if (v == center || std::binary_search(hdc.begin(), hdc.end(), v)) continue;
      bool smallest = true;
      for (NodeId h : hdc) {
        if (!(h < ctx.self())) break;
        if (ctx.view().adjacent(v, h)) {
          smallest = false;
          break;
        }
      }
      if (smallest) out.push(v, Tag::GrowEdge, {center.word()});
    }
  }
  list_.clear();
  return true;
}

namespace {

class GrowProgram final : public NodeProgram {
 public:
  GrowProgram(const Cluster& c, bool member, GrowAgent* agent)
      : cluster_(c), member_(member), agent_(agent) {}

  void init(NodeContext& ctx) override {
    if (ctx.self() == cluster_.center) agent_->start(ctx, cluster_.members, out_);
    out_.flush(ctx);
  }

  void on_round(NodeContext& ctx, std::span<const Message> inbox) override {
    for (const Message& m : inbox) agent_->handle(ctx, m, member_ ? cluster_.id : kNoNode, out_);
    out_.flush(ctx);
  }

 private:
  const Cluster& cluster_;
  bool member_;
  GrowAgent* agent_;
  EdgeQueues out_;
};

}  // namespace

GrowResult grow_cluster(const Graph& g, const Cluster& c, RunConfig config) {
  g.index(c.center);
  std::vector<NodeId> members = c.members;
  std::sort(members.begin(), members.end());
  std::vector<GrowAgent> agents(g.n());
  GrowResult r;
  r.run = run_programs(g, config, [&](int i) {
    const bool member = std::binary_search(members.begin(), members.end(), g.id(i));
    return std::make_unique<GrowProgram>(c, member, &agents[static_cast<std::size_t>(i)]);
  });
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (auto it = agents[i].adopted().find(c.id); it != agents[i].adopted().end())
      r.edges.insert(Edge(it->second, g.id(static_cast<int>(i))));
  }
  r.plan = *agents[static_cast<std::size_t>(g.index(c.center))].plan();
  return r;
}

}  // namespace ktlab
