#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ktlab/graph.hpp"
#include "ktlab/knowledge.hpp"
#include "ktlab/random.hpp"

namespace ktlab {

enum class Tag : std::uint8_t {
  Msg1,
  Msg2,
  Msg3,
  Probe,
  Reply,
  Sketch,
  // Application and plumbing tags.
  Ping,
  Join,
  Dump,
  Status,
  Upstream,
  Connect,
  GrowList,
  GrowEdge,
  Leader,
  ChildNotice,
  Candidate,
  Accept,
  Reject,
  Fallback,
  Report,
  Chosen,
  Flood,
  Label,
  Done,
};

const char* to_string(Tag t);

/// Payload capacity; one more than the default width so oversized payloads
/// are representable and the engine can reject them.
constexpr std::size_t kPayloadCapacity = 3;

struct Message {
  NodeId src;
  NodeId dst;
  std::uint32_t port = 0;  // 1-based port at the sender
  Tag tag = Tag::Ping;
  std::uint8_t size = 0;
  std::array<Word, kPayloadCapacity> payload{};

  Word at(std::size_t i) const { return payload[i]; }
  NodeId id_at(std::size_t i) const { return NodeId::from_word(payload[i]); }
};

struct RunConfig {
  int rho = 2;
  /// Width budget in words, counting the tag word.
  int width = 3;
  std::uint64_t round_cap = 1'000'000;
  bool audit = false;
  bool record_transcript = false;
  std::uint64_t seed = 0;
  Stream stream = Stream::Engine;
  std::uint64_t salt = 0;
};

struct TranscriptEntry {
  std::uint64_t round = 0;  // delivery round
  Message msg;
};

struct RunResult {
  std::uint64_t rounds = 0;
  std::uint64_t messages = 0;
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::size_t max_inbox = 0;
  std::vector<TranscriptEntry> transcript;
};

class Engine;

/// Everything a node may touch during a round: its own view, its own random
/// stream, and its outgoing link.
class NodeContext {
 public:
  NodeId self() const { return view_.self(); }
  const LocalView& view() const { return view_; }
  /// 0 during init, r while processing the inbox delivered in round r.
  std::uint64_t round() const { return round_; }
  std::mt19937_64& rng() { return rng_; }

  /// Queue a message for delivery next round. At most one message per
  /// incident edge per round; payload limited by the width budget.
  void send(NodeId to, Tag tag, std::initializer_list<Word> payload = {});
  /// Ask to be scheduled next round even without incoming messages.
  void stay_awake() { awake_ = true; }

 private:
  friend class Engine;
  NodeContext(Engine& e, int index, LocalView view, std::mt19937_64 rng)
      : engine_(&e), index_(index), view_(view), rng_(std::move(rng)) {}

  Engine* engine_;
  int index_;
  LocalView view_;
  std::mt19937_64 rng_;
  std::uint64_t round_ = 0;
  bool awake_ = false;
};

/// Behavior of one node. Programs read only their context, their inbox and
/// whatever per-node storage they were constructed with.
class NodeProgram {
 public:
  virtual ~NodeProgram() = default;
  virtual void init(NodeContext& ctx) { (void)ctx; }
  virtual void on_round(NodeContext& ctx, std::span<const Message> inbox) = 0;
};

using Programs = std::vector<std::unique_ptr<NodeProgram>>;

/// Synchronous lock-step executor. Messages sent in round t are delivered at
/// the start of round t+1; the run ends when no message is in flight and no
/// node asked to stay awake. The round counter counts delivery rounds.
class Engine {
 public:
  Engine(const Graph& g, RunConfig config);

  /// `programs[i]` runs on the node with dense index i.
  RunResult run(Programs& programs);

  const Graph& graph() const { return *g_; }
  const RunConfig& config() const { return config_; }

 private:
  friend class NodeContext;
  void post(int sender, NodeId to, Tag tag, std::initializer_list<Word> payload);

  const Graph* g_;
  RunConfig config_;
  std::unique_ptr<BallCache> balls_;
  std::vector<std::vector<std::uint64_t>> last_send_;  // per node, per port: round+1 of last send
  std::vector<Message> outgoing_;
  std::uint64_t round_ = 0;
  RunResult result_;
};

/// Convenience: build programs with `make(index)` and run them.
RunResult run_programs(const Graph& g, const RunConfig& config,
                       const std::function<std::unique_ptr<NodeProgram>(int)>& make);

/// One labeled slice of a pipeline's cost.
struct PhaseMetrics {
  std::string label;
  std::uint64_t rounds = 0;
  std::uint64_t messages = 0;
};

struct FallbackEvent {
  std::string phase;
  NodeId where;
  std::string reason;
};

/// Exact per-phase round and message counters plus the w.h.p. fallback log.
struct Metrics {
  std::vector<PhaseMetrics> phases;
  std::vector<FallbackEvent> fallback_events;
  std::size_t max_inbox = 0;

  void add(const std::string& label, std::uint64_t rounds, std::uint64_t messages);
  void add(const std::string& label, const RunResult& r);
  void merge(const Metrics& other);
  std::uint64_t rounds() const;
  std::uint64_t messages() const;
  std::uint64_t rounds(const std::string& label) const;
  std::uint64_t messages(const std::string& label) const;
};

/// JSON lines, one object per message: {round, src, dst, tag, payload}.
void write_transcript_jsonl(std::ostream& os, const std::vector<TranscriptEntry>& transcript);

}  // namespace ktlab
