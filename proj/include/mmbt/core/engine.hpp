#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>

#include "mmbt/core/blackboard.hpp"
#include "mmbt/core/clock.hpp"
#include "mmbt/core/status.hpp"
#include "mmbt/core/trace.hpp"
#include "mmbt/core/tree.hpp"
#include "mmbt/errors.hpp"

namespace mmbt {

// Everything a tick touches: trial state, leaf handlers and the optional
// tracer. One Env per tree instance; never shared across threads.
struct Env {
  Blackboard blackboard;
  SimClock clock;
  Tracer* tracer = nullptr;
  std::uint64_t trial = 0;

  std::function<NodeStatus(const std::string& name, const Args& args, Env&)> action;
  std::function<NodeStatus(const std::string& name, const fusion::FusionPolicy& policy, Env&)> condition;
};

// Ticks an expanded tree with memory semantics: a composite whose child
// returned Running resumes at that child on the next tick; completion
// (Success/Failure) clears the node's memory. reset() clears all memory
// but leaves blackboard and clock alone.
class TreeRuntime {
 public:
  explicit TreeRuntime(const TreeDef& tree) : root_(expand(tree)) {}
  explicit TreeRuntime(Node expanded_root) : root_(std::move(expanded_root)) {}

  NodeStatus tick(Env& env) {
    visits_left_ = max_visits_per_tick_;
    ++tick_index_;
    return tick_node(root_, env);
  }

  void reset() { memory_.clear(); }

  const Node& root() const { return root_; }
  std::uint64_t tick_index() const { return tick_index_; }

  // Safety net for malformed loops (e.g. an unguarded repeat whose child
  // always fails); generous enough for any legitimate tree.
  void set_max_visits_per_tick(std::uint64_t n) { max_visits_per_tick_ = n; }

 private:
  struct Memory {
    std::size_t cursor = 0;     // sequence / fallback resume point
    std::uint32_t repeats = 0;  // repeat_until_success count
  };

  NodeStatus tick_node(const Node& node, Env& env) {
    if (visits_left_ == 0) raise(Errc::tick_budget_exceeded, "node visit budget exhausted");
    --visits_left_;

    const double t_enter = env.clock.now();
    std::size_t trace_index = 0;
    if (env.tracer) {
      TickRecord rec;
      rec.trial = env.trial;
      rec.tick = tick_index_;
      rec.node_id = node.id;
      rec.kind = kind_label(node);
      rec.t_enter = t_enter;
      trace_index = env.tracer->begin_record(std::move(rec));
    }

    NodeStatus status = NodeStatus::Failure;
    switch (node.kind) {
      case NodeKind::Sequence: status = tick_sequence(node, env); break;
      case NodeKind::Fallback: status = tick_fallback(node, env); break;
      case NodeKind::Parallel: status = tick_parallel(node, env); break;
      case NodeKind::Decorator: status = tick_decorator(node, env); break;
      case NodeKind::Action: status = tick_action(node, env); break;
      case NodeKind::Condition: status = tick_condition(node, env); break;
      case NodeKind::UseSkill:
        raise(Errc::invalid_tree, "use_skill survived expansion: '" + node.name + "'");
    }

    if (env.tracer) env.tracer->end_record(trace_index, status, env.clock.now());
    return status;
  }

  NodeStatus tick_sequence(const Node& node, Env& env) {
    Memory& mem = memory_[node.id];
    for (std::size_t i = mem.cursor; i < node.children.size(); ++i) {
      NodeStatus s = tick_node(node.children[i], env);
      if (s == NodeStatus::Running) {
        mem.cursor = i;
        return NodeStatus::Running;
      }
      if (s == NodeStatus::Failure) {
        memory_.erase(node.id);
        return NodeStatus::Failure;
      }
    }
    memory_.erase(node.id);
    return NodeStatus::Success;
  }

  NodeStatus tick_fallback(const Node& node, Env& env) {
    Memory& mem = memory_[node.id];
    for (std::size_t i = mem.cursor; i < node.children.size(); ++i) {
      NodeStatus s = tick_node(node.children[i], env);
      if (s == NodeStatus::Running) {
        mem.cursor = i;
        return NodeStatus::Running;
      }
      if (s == NodeStatus::Success) {
        memory_.erase(node.id);
        return NodeStatus::Success;
      }
    }
    memory_.erase(node.id);
    return NodeStatus::Failure;
  }

  // Every child is ticked exactly once per parallel tick, each starting at
  // the parallel's entry time; the clock then advances by the largest
  // child delta. Failure wins over Running, Success needs all children.
  NodeStatus tick_parallel(const Node& node, Env& env) {
    const double t_enter = env.clock.now();
    double max_delta = 0.0;
    bool any_failure = false;
    bool any_running = false;
    for (const Node& child : node.children) {
      env.clock.set(t_enter);
      NodeStatus s = tick_node(child, env);
      max_delta = std::max(max_delta, env.clock.now() - t_enter);
      if (s == NodeStatus::Failure) any_failure = true;
      if (s == NodeStatus::Running) any_running = true;
    }
    env.clock.set(t_enter + max_delta);
    if (any_failure) return NodeStatus::Failure;
    return any_running ? NodeStatus::Running : NodeStatus::Success;
  }

  NodeStatus tick_decorator(const Node& node, Env& env) {
    const Node& child = node.children.front();
    switch (node.decorator) {
      case DecoratorKind::Inverter: {
        NodeStatus s = tick_node(child, env);
        if (s == NodeStatus::Success) return NodeStatus::Failure;
        if (s == NodeStatus::Failure) return NodeStatus::Success;
        return NodeStatus::Running;
      }
      case DecoratorKind::ForceSuccess: {
        NodeStatus s = tick_node(child, env);
        return s == NodeStatus::Running ? NodeStatus::Running : NodeStatus::Success;
      }
      case DecoratorKind::RepeatUntilSuccess: {
        Memory& mem = memory_[node.id];
        for (;;) {
          NodeStatus s = tick_node(child, env);
          if (s == NodeStatus::Running) return NodeStatus::Running;
          if (s == NodeStatus::Success) {
            memory_.erase(node.id);
            return NodeStatus::Success;
          }
          ++mem.repeats;
          reset_subtree(child);
          if (node.max_repeats && mem.repeats >= *node.max_repeats) {
            memory_.erase(node.id);
            return NodeStatus::Failure;
          }
        }
      }
    }
    return NodeStatus::Failure;
  }

  NodeStatus tick_action(const Node& node, Env& env) {
    if (!env.action) raise(Errc::unknown_handler, "no action handler registered");
    return env.action(node.name, node.args, env);
  }

  NodeStatus tick_condition(const Node& node, Env& env) {
    if (!env.condition) raise(Errc::unknown_handler, "no condition handler registered");
    NodeStatus s = env.condition(node.name, node.policy, env);
    if (s == NodeStatus::Running)
      raise(Errc::condition_returned_running, "condition '" + node.name + "'");
    return s;
  }

  void reset_subtree(const Node& node) {
    memory_.erase(node.id);
    for (const Node& c : node.children) reset_subtree(c);
  }

  static std::string kind_label(const Node& node) {
    switch (node.kind) {
      case NodeKind::Action: return "action:" + node.name;
      case NodeKind::Condition: return "condition:" + node.name;
      case NodeKind::Decorator: return to_string(node.decorator);
      default: return to_string(node.kind);
    }
  }

  Node root_;
  std::unordered_map<std::string, Memory> memory_;
  std::uint64_t tick_index_ = 0;
  std::uint64_t max_visits_per_tick_ = 1'000'000;
  std::uint64_t visits_left_ = 0;
};

// Free-function forms matching the operation names used elsewhere.
inline NodeStatus tick_tree(TreeRuntime& runtime, Env& env) { return runtime.tick(env); }
inline void reset_tree(TreeRuntime& runtime) { runtime.reset(); }

}  // namespace mmbt
