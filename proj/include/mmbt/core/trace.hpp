#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mmbt/core/status.hpp"

namespace mmbt {

// One node visit. `kind` carries the leaf name ("action:close_gripper")
// so traces read without the tree at hand.
struct TickRecord {
  std::uint64_t trial = 0;
  std::uint64_t tick = 0;
  std::string node_id;
  std::string kind;
  NodeStatus status = NodeStatus::Running;
  double t_enter = 0.0;
  double t_exit = 0.0;
};

// One fused-condition evaluation: the per-modality votes in policy order,
// their weighted sum and the verdict.
struct VoteRecord {
  std::string condition;
  std::vector<int> votes;
  double weighted_sum = 0.0;
  bool verdict = false;
};

using TraceEvent = std::variant<TickRecord, VoteRecord>;

// Collects events during a tick; the engine emits node visits in entry
// order with statuses filled on exit. Sinks (file writers) consume the
// buffer after the tick so I/O failures cannot alter tick results.
class Tracer {
 public:
  std::size_t begin_record(TickRecord record) {
    events_.emplace_back(std::move(record));
    return events_.size() - 1;
  }

  void end_record(std::size_t index, NodeStatus status, double t_exit) {
    auto& rec = std::get<TickRecord>(events_[index]);
    rec.status = status;
    rec.t_exit = t_exit;
  }

  void add_vote(VoteRecord record) { events_.emplace_back(std::move(record)); }

  const std::vector<TraceEvent>& events() const { return events_; }
  void clear() { events_.clear(); }

 private:
  std::vector<TraceEvent> events_;
};

}  // namespace mmbt
