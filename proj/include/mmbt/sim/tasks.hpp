#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmbt/core/engine.hpp"
#include "mmbt/rng.hpp"
#include "mmbt/sim/signal.hpp"
#include "mmbt/sim/surrogate.hpp"
#include "mmbt/sim/worlds.hpp"

namespace mmbt::sim {

// Nominal action durations in simulated seconds, keyed by action name.
// Recording actions carry their duration as a `dur=` argument in the tree
// instead, since those times are part of the task definition.
using ActionCatalog = std::map<std::string, double>;

// One fused-condition evaluation with the ground truth it was judged
// against; the per-condition accuracy statistics aggregate these.
struct VoteLogEntry {
  std::string condition;
  std::vector<int> votes;
  double weighted_sum = 0.0;
  bool verdict = false;
  bool truth = false;
};

struct TaskSetup {
  WorldParams params;
  FaultInjection faults;
  SurrogateTable surrogates;
  ActionCatalog durations;
  std::map<std::string, fusion::FusionPolicy> policy_overrides;
  bool strict_printed_rule = false;
};

namespace detail {

// Shared plumbing: duration lookup, recording actions, fused conditions.
template <typename Derived>
class TaskBase {
 public:
  TaskBase(const TaskSetup& setup, Rng rng, std::uint64_t trial)
      : setup_(setup), rng_(std::move(rng)), trial_(trial) {}

  // Wire this task's handlers into an execution environment.
  void bind(Env& env) {
    env.trial = trial_;
    env.action = [this](const std::string& name, const Args& args, Env& e) {
      return self().handle_action(name, args, e);
    };
    env.condition = [this](const std::string& name, const fusion::FusionPolicy& policy, Env& e) {
      return self().handle_condition(name, policy, e);
    };
  }

  const std::vector<VoteLogEntry>& vote_log() const { return votes_; }
  Rng& rng() { return rng_; }
  std::uint64_t trial() const { return trial_; }

 protected:
  Derived& self() { return static_cast<Derived&>(*this); }

  double duration_of(const std::string& name, const Args& args) const {
    auto it = args.find("dur");
    if (it != args.end()) {
      const double* d = std::get_if<double>(&it->second);
      if (!d || *d < 0.0) raise(Errc::config, "action '" + name + "' has a bad dur argument");
      return *d;
    }
    auto cat = setup_.durations.find(name);
    if (cat == setup_.durations.end())
      raise(Errc::config, "no duration configured for action '" + name + "'");
    if (cat->second < 0.0) raise(Errc::config, "negative duration for action '" + name + "'");
    return cat->second;
  }

  void record_ft(const Args& args, Env& env, bool in_contact) {
    const double dur = duration_of("record_ft", args);
    TimeSeries raw = synth_ft_trace(dur, setup_.params.ft_rate_hz, in_contact, rng_);
    env.blackboard.put("ft_trace", raw);
    env.blackboard.put("ft_trace_filtered", preprocess_ft(raw, kFilterWindow));
    env.clock.advance(dur);
  }

  void record_tactile(const Args& args, Env& env, bool in_contact) {
    const double dur = duration_of("record_tactile", args);
    env.blackboard.put("tactile_trace",
                       synth_tactile_trace(dur, setup_.params.ft_rate_hz, in_contact, rng_));
    env.clock.advance(dur);
  }

  void capture(const std::string& key, const std::string& name, const Args& args, Env& env) {
    env.clock.advance(duration_of(name, args));
    env.blackboard.put(key, name + "@t=" + std::to_string(env.clock.now()));
  }

  NodeStatus handle_condition(const std::string& name, const fusion::FusionPolicy& node_policy,
                              Env& env) {
    const bool truth = self().ground_truth(name);
    auto ov = setup_.policy_overrides.find(name);
    const fusion::FusionPolicy& policy = ov != setup_.policy_overrides.end() ? ov->second : node_policy;

    auto predictions = sense(truth, policy, setup_.surrogates, rng_);
    const double sum = fusion::weighted_sum(predictions, policy);
    const bool verdict = fusion::vote(predictions, policy, setup_.strict_printed_rule);

    VoteLogEntry entry;
    entry.condition = name;
    for (const auto& p : predictions) entry.votes.push_back(p.vote);
    entry.weighted_sum = sum;
    entry.verdict = verdict;
    entry.truth = truth;
    votes_.push_back(entry);

    if (env.tracer) {
      VoteRecord rec;
      rec.condition = entry.condition;
      rec.votes = entry.votes;
      rec.weighted_sum = entry.weighted_sum;
      rec.verdict = entry.verdict;
      env.tracer->add_vote(std::move(rec));
    }
    return verdict ? NodeStatus::Success : NodeStatus::Failure;
  }

  static constexpr std::size_t kFilterWindow = 5;

  TaskSetup setup_;
  Rng rng_;
  std::uint64_t trial_ = 0;
  std::vector<VoteLogEntry> votes_;
};

}  // namespace detail

// Vial screw capping: grasp a cap, mount it on the vial neck, fasten with
// repeated quarter turns until sealed or the iteration budget runs out.
class CappingTask : public detail::TaskBase<CappingTask> {
 public:
  CappingTask(const TaskSetup& setup, Rng rng, std::uint64_t trial)
      : TaskBase(setup, std::move(rng), trial) {
    world_.required_turns =
        static_cast<int>(rng_.uniform_int(setup_.params.required_turns_min,
                                          setup_.params.required_turns_max));
  }

  CappingWorld& world() { return world_; }
  const CappingWorld& world() const { return world_; }

  bool ground_truth(const std::string& condition) const {
    if (condition == "mount_aligned") return world_.mounted_ok && !world_.cap_dropped;
    if (condition == "fully_capped") return world_.sealed;
    if (condition == "max_iter_reached") return world_.fasten_iter >= setup_.params.max_iterations;
    if (condition == "at_fasten_end") return world_.at_fasten_end;
    if (condition == "gripper_open") return !world_.gripper_closed;
    raise(Errc::unknown_handler, "condition '" + condition + "'");
  }

  NodeStatus handle_action(const std::string& name, const Args& args, Env& env) {
    if (name == "record_ft") {
      record_ft(args, env, world_.frame == ToolFrame::Contact);
    } else if (name == "record_tactile") {
      record_tactile(args, env, world_.frame == ToolFrame::Contact);
    } else if (name == "capture_rgb") {
      capture("rgb_frame", name, args, env);
    } else if (name == "move_to_prepick") {
      world_.frame = ToolFrame::PrePick;
      env.clock.advance(duration_of(name, args));
    } else if (name == "move_to_pick") {
      world_.frame = ToolFrame::Pick;
      env.clock.advance(duration_of(name, args));
    } else if (name == "move_home") {
      world_.frame = ToolFrame::Home;
      env.clock.advance(duration_of(name, args));
    } else if (name == "move_to_premount") {
      world_.frame = ToolFrame::PreMount;
      if (setup_.faults.inject(trial_)) {
        const double h = setup_.faults.capping_offset_mm;
        world_.cap_offset_x_mm = rng_.uniform(-h, h);
        world_.cap_offset_y_mm = rng_.uniform(-h, h);
      } else {
        world_.cap_offset_x_mm = 0.0;
        world_.cap_offset_y_mm = 0.0;
      }
      env.clock.advance(duration_of(name, args));
    } else if (name == "move_until_contact") {
      if (world_.frame != ToolFrame::PreMount)
        raise(Errc::physical_order, "move_until_contact away from the pre-mount frame");
      world_.frame = ToolFrame::Contact;
      if (world_.cap_grasped) {
        const double off = std::max(std::abs(world_.cap_offset_x_mm), std::abs(world_.cap_offset_y_mm));
        world_.mounted_ok = off <= setup_.params.thread_engage_tol_mm;
      }
      env.clock.advance(duration_of(name, args));
    } else if (name == "open_gripper") {
      world_.gripper_closed = false;
      if (world_.cap_grasped) {
        if (world_.mounted_ok) {
          world_.cap_grasped = false;  // cap stays threaded on the vial
        } else if (world_.frame == ToolFrame::Contact) {
          world_.cap_grasped = false;  // unmeshed cap falls off the vial
          world_.cap_dropped = true;
        } else {
          world_.cap_grasped = false;
        }
      }
      env.clock.advance(duration_of(name, args));
    } else if (name == "close_gripper") {
      world_.gripper_closed = true;
      if (world_.frame == ToolFrame::Pick) world_.cap_grasped = true;
      if (world_.frame == ToolFrame::Contact && !world_.cap_dropped) world_.cap_grasped = true;
      env.clock.advance(duration_of(name, args));
    } else if (name == "rotate_cw_90") {
      if (!world_.gripper_closed) raise(Errc::physical_order, "fastening with the gripper open");
      if (world_.frame != ToolFrame::Contact)
        raise(Errc::physical_order, "fastening away from the vial");
      world_.at_fasten_end = true;
      if (world_.cap_grasped && world_.mounted_ok) {
        ++world_.applied_turns;
        world_.sealed = world_.applied_turns >= world_.required_turns;
      }
      env.clock.advance(duration_of(name, args));
    } else if (name == "rotate_ccw_90") {
      // Legal with the gripper open: that is the stroke reset move.
      if (world_.frame != ToolFrame::Contact)
        raise(Errc::physical_order, "stroke reset away from the vial");
      world_.at_fasten_end = false;
      if (world_.gripper_closed && world_.cap_grasped && world_.mounted_ok &&
          world_.applied_turns > 0) {
        --world_.applied_turns;  // unscrews when still gripping
        world_.sealed = world_.applied_turns >= world_.required_turns;
      }
      env.clock.advance(duration_of(name, args));
    } else if (name == "inc_fasten_iter") {
      ++world_.fasten_iter;
      env.clock.advance(duration_of(name, args));
    } else {
      raise(Errc::unknown_handler, "action '" + name + "'");
    }
    world_.clock.set(env.clock.now());
    world_.check_invariants(setup_.params.max_iterations);
    return NodeStatus::Success;
  }

 private:
  CappingWorld world_;
};

// Rack insertion: grasp the rack, align it over the holder, press down
// until contact; insertion succeeds exactly when the pose was within
// tolerance (closed bounds).
class InsertionTask : public detail::TaskBase<InsertionTask> {
 public:
  InsertionTask(const TaskSetup& setup, Rng rng, std::uint64_t trial)
      : TaskBase(setup, std::move(rng), trial) {}

  InsertionWorld& world() { return world_; }
  const InsertionWorld& world() const { return world_; }

  bool ground_truth(const std::string& condition) const {
    if (condition == "rack_aligned") return world_.aligned_ok;
    if (condition == "rack_inserted") return world_.inserted_ok;
    if (condition == "gripper_open") return !world_.gripper_closed;
    raise(Errc::unknown_handler, "condition '" + condition + "'");
  }

  NodeStatus handle_action(const std::string& name, const Args& args, Env& env) {
    if (name == "record_ft") {
      record_ft(args, env, world_.frame == ToolFrame::Contact);
    } else if (name == "capture_rgb") {
      capture("rgb_frame", name, args, env);
    } else if (name == "capture_depth") {
      capture("depth_frame", name, args, env);
    } else if (name == "move_to_prepick") {
      world_.frame = ToolFrame::PrePick;
      env.clock.advance(duration_of(name, args));
    } else if (name == "move_to_pick") {
      world_.frame = ToolFrame::Pick;
      env.clock.advance(duration_of(name, args));
    } else if (name == "move_home") {
      world_.frame = ToolFrame::Home;
      env.clock.advance(duration_of(name, args));
    } else if (name == "open_gripper") {
      world_.gripper_closed = false;
      world_.rack_grasped = false;
      env.clock.advance(duration_of(name, args));
    } else if (name == "close_gripper") {
      world_.gripper_closed = true;
      if (world_.frame == ToolFrame::Pick) world_.rack_grasped = true;
      env.clock.advance(duration_of(name, args));
    } else if (name == "move_to_preinsert") {
      world_.frame = ToolFrame::PreInsert;
      if (setup_.faults.inject(trial_)) {
        world_.offset_x_mm = rng_.uniform(-setup_.faults.insertion_offset_mm,
                                          setup_.faults.insertion_offset_mm);
        world_.offset_y_mm = rng_.uniform(-setup_.faults.insertion_offset_mm,
                                          setup_.faults.insertion_offset_mm);
        world_.yaw_deg = rng_.uniform(-setup_.faults.insertion_yaw_deg,
                                      setup_.faults.insertion_yaw_deg);
      } else {
        world_.offset_x_mm = 0.0;
        world_.offset_y_mm = 0.0;
        world_.yaw_deg = 0.0;
      }
      update_alignment();
      env.clock.advance(duration_of(name, args));
    } else if (name == "move_until_contact") {
      if (world_.frame != ToolFrame::PreInsert)
        raise(Errc::physical_order, "move_until_contact away from the pre-insert frame");
      world_.frame = ToolFrame::Contact;
      world_.inserted_ok = world_.rack_grasped && world_.aligned_ok;
      env.clock.advance(duration_of(name, args));
    } else {
      raise(Errc::unknown_handler, "action '" + name + "'");
    }
    world_.clock.set(env.clock.now());
    world_.check_invariants(setup_.params);
    return NodeStatus::Success;
  }

 private:
  void update_alignment() { world_.aligned_ok = world_.pose_within(setup_.params); }

  InsertionWorld world_;
};

}  // namespace mmbt::sim
