#pragma once

#include <array>
#include <deque>
#include <map>

#include "ktlab/engine.hpp"

namespace ktlab {

/// Per-edge FIFO queues for programs that pipeline several messages over the
/// same edge. flush() sends at most one queued message per edge per round.
class EdgeQueues {
 public:
  void push(NodeId to, Tag tag, std::initializer_list<Word> payload = {}) {
    Item it;
    it.tag = tag;
    it.size = static_cast<std::uint8_t>(payload.size());
    std::copy(payload.begin(), payload.end(), it.payload.begin());
    queues_[to].push_back(it);
  }

  /// Sends the head of every non-empty queue; keeps the node awake while work remains.
  void flush(NodeContext& ctx) {
    for (auto it = queues_.begin(); it != queues_.end();) {
      auto& q = it->second;
      const Item& head = q.front();
      switch (head.size) {
        case 0: ctx.send(it->first, head.tag); break;
        case 1: ctx.send(it->first, head.tag, {head.payload[0]}); break;
        case 2: ctx.send(it->first, head.tag, {head.payload[0], head.payload[1]}); break;
        default: ctx.send(it->first, head.tag, {head.payload[0], head.payload[1], head.payload[2]}); break;
      }
      q.pop_front();
      it = q.empty() ? queues_.erase(it) : std::next(it);
    }
    if (!queues_.empty()) ctx.stay_awake();
  }

  bool empty() const { return queues_.empty(); }
  std::size_t pending(NodeId to) const {
    auto it = queues_.find(to);
    return it == queues_.end() ? 0 : it->second.size();
  }

 private:
  struct Item {
    Tag tag;
    std::uint8_t size;
    std::array<Word, kPayloadCapacity> payload;
  };
  std::map<NodeId, std::deque<Item>> queues_;
};

}  // namespace ktlab
