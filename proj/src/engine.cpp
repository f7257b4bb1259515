#include "ktlab/engine.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

namespace ktlab {

const char* to_string(Tag t) {
  switch (t) {
    case Tag::Msg1: return "msg1";
    case Tag::Msg2: return "msg2";
    case Tag::Msg3: return "msg3";
    case Tag::Probe: return "probe";
    case Tag::Reply: return "reply";
    case Tag::Sketch: return "sketch";
    case Tag::Ping: return "ping";
    case Tag::Join: return "join";
    case Tag::Dump: return "dump";
    case Tag::Status: return "status";
    case Tag::Upstream: return "upstream";
    case Tag::Connect: return "connect";
    case Tag::GrowList: return "grow-list";
    case Tag::GrowEdge: return "grow-edge";
    case Tag::Leader: return "leader";
    case Tag::ChildNotice: return "child";
    case Tag::Candidate: return "candidate";
    case Tag::Accept: return "accept";
    case Tag::Reject: return "reject";
    case Tag::Fallback: return "fallback";
    case Tag::Report: return "report";
    case Tag::Chosen: return "chosen";
    case Tag::Flood: return "flood";
    case Tag::Label: return "label";
    case Tag::Done: return "done";
  }
  return "?";
}

void NodeContext::send(NodeId to, Tag tag, std::initializer_list<Word> payload) {
  engine_->post(index_, to, tag, payload);
}

Engine::Engine(const Graph& g, RunConfig config) : g_(&g), config_(config) {
  if (config_.round_cap < 1) throw ParameterError("round_cap must be at least 1");
  if (config_.width < 1) throw ParameterError("width must be at least 1");
  if (config_.audit) balls_ = std::make_unique<BallCache>(g, config_.rho);
}

void Engine::post(int sender, NodeId to, Tag tag, std::initializer_list<Word> payload) {
  const NodeId from = g_->id(sender);
  const int port = g_->port_of(sender, to);
  if (port < 0) {
    throw ProtocolError("node " + std::to_string(from.value) + " sent to non-neighbor " + std::to_string(to.value) +
                        " in round " + std::to_string(round_));
  }
  if (payload.size() + 1 > static_cast<std::size_t>(config_.width) || payload.size() > kPayloadCapacity) {
    throw ProtocolError("width violation: node " + std::to_string(from.value) + " sent " +
                        std::to_string(payload.size()) + " payload words in round " + std::to_string(round_));
  }
  auto& stamp = last_send_[static_cast<std::size_t>(sender)][static_cast<std::size_t>(port)];
  if (stamp == round_ + 1) {
    throw ProtocolError("node " + std::to_string(from.value) + " sent two messages to " + std::to_string(to.value) +
                        " in round " + std::to_string(round_));
  }
  stamp = round_ + 1;
  Message m;
  m.src = from;
  m.dst = to;
  m.port = static_cast<std::uint32_t>(port + 1);
  m.tag = tag;
  m.size = static_cast<std::uint8_t>(payload.size());
  std::copy(payload.begin(), payload.end(), m.payload.begin());
  outgoing_.push_back(m);
  ++result_.sent;
}

RunResult Engine::run(Programs& programs) {
  const std::size_t n = g_->n();
  if (programs.size() != n) throw ContractError("engine: one program per node required");
  result_ = RunResult{};
  outgoing_.clear();
  round_ = 0;
  last_send_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) last_send_[i].assign(g_->degree(static_cast<int>(i)), 0);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return g_->id(a) < g_->id(b); });

  std::vector<NodeContext> ctx;
  ctx.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int idx = static_cast<int>(i);
    ctx.push_back(NodeContext(*this, idx,
                              LocalView(*g_, idx, config_.rho, config_.audit, balls_ ? balls_->distances(idx) : nullptr),
                              node_rng(config_.seed, config_.stream, g_->id(idx), config_.salt)));
  }

  std::vector<char> awake(n, 0);
  bool any_awake = false;
  for (int i : order) {
    auto& c = ctx[static_cast<std::size_t>(i)];
    c.round_ = 0;
    c.awake_ = false;
    programs[static_cast<std::size_t>(i)]->init(c);
    awake[static_cast<std::size_t>(i)] = c.awake_;
    any_awake = any_awake || c.awake_;
  }

  std::vector<Message> inflight;
  std::vector<std::size_t> offsets(n + 1);
  std::vector<Message> inbox_flat;
  while (!outgoing_.empty() || any_awake) {
    if (round_ + 1 > config_.round_cap) {
      throw NonTerminationError("round cap of " + std::to_string(config_.round_cap) + " exceeded");
    }
    ++round_;
    inflight.swap(outgoing_);
    outgoing_.clear();

    // Stable bucket by destination.
    std::fill(offsets.begin(), offsets.end(), 0);
    for (const Message& m : inflight) ++offsets[static_cast<std::size_t>(g_->index(m.dst)) + 1];
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    inbox_flat.resize(inflight.size());
    {
      std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
      for (const Message& m : inflight) inbox_flat[cursor[static_cast<std::size_t>(g_->index(m.dst))]++] = m;
    }
    result_.messages += inflight.size();
    result_.received += inflight.size();
    if (config_.record_transcript)
      for (const Message& m : inflight) result_.transcript.push_back({round_, m});
    inflight.clear();

    any_awake = false;
    for (int i : order) {
      const auto ui = static_cast<std::size_t>(i);
      const std::size_t count = offsets[ui + 1] - offsets[ui];
      result_.max_inbox = std::max(result_.max_inbox, count);
      if (count == 0 && !awake[ui]) continue;
      auto& c = ctx[ui];
      c.round_ = round_;
      c.awake_ = false;
      programs[ui]->on_round(c, std::span<const Message>(inbox_flat.data() + offsets[ui], count));
      awake[ui] = c.awake_;
      any_awake = any_awake || c.awake_;
    }
  }
  result_.rounds = round_;
  return std::move(result_);
}

RunResult run_programs(const Graph& g, const RunConfig& config,
                       const std::function<std::unique_ptr<NodeProgram>(int)>& make) {
  Programs programs;
  programs.reserve(g.n());
  for (int i = 0; i < static_cast<int>(g.n()); ++i) programs.push_back(make(i));
  Engine engine(g, config);
  return engine.run(programs);
}

void Metrics::add(const std::string& label, std::uint64_t rounds, std::uint64_t messages) {
  for (auto& p : phases) {
    if (p.label == label) {
      p.rounds += rounds;
      p.messages += messages;
      return;
    }
  }
  phases.push_back({label, rounds, messages});
}

void Metrics::add(const std::string& label, const RunResult& r) {
  add(label, r.rounds, r.messages);
  max_inbox = std::max(max_inbox, r.max_inbox);
}

void Metrics::merge(const Metrics& other) {
  for (const auto& p : other.phases) add(p.label, p.rounds, p.messages);
  fallback_events.insert(fallback_events.end(), other.fallback_events.begin(), other.fallback_events.end());
  max_inbox = std::max(max_inbox, other.max_inbox);
}

std::uint64_t Metrics::rounds() const {
  std::uint64_t s = 0;
  for (const auto& p : phases) s += p.rounds;
  return s;
}

std::uint64_t Metrics::messages() const {
  std::uint64_t s = 0;
  for (const auto& p : phases) s += p.messages;
  return s;
}

std::uint64_t Metrics::rounds(const std::string& label) const {
  for (const auto& p : phases)
    if (p.label == label) return p.rounds;
  return 0;
}

std::uint64_t Metrics::messages(const std::string& label) const {
  for (const auto& p : phases)
    if (p.label == label) return p.messages;
  return 0;
}

void write_transcript_jsonl(std::ostream& os, const std::vector<TranscriptEntry>& transcript) {
  for (const auto& t : transcript) {
    nlohmann::json j;
    j["round"] = t.round;
    j["src"] = t.msg.src.value;
    j["dst"] = t.msg.dst.value;
    j["tag"] = to_string(t.msg.tag);
    j["payload"] = std::vector<Word>(t.msg.payload.begin(), t.msg.payload.begin() + t.msg.size);
    os << j.dump() << '\n';
  }
}

}  // namespace ktlab
