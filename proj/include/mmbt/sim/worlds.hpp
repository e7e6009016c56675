#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "mmbt/core/clock.hpp"
#include "mmbt/errors.hpp"

namespace mmbt::sim {

// Poses the scripted primitives move between; enough state to catch
// physically impossible action orders.
enum class ToolFrame { Home, PrePick, Pick, PreMount, Contact, PreInsert };

// Ground truth for the vial screw-capping task.
struct CappingWorld {
  bool gripper_closed = false;
  bool cap_grasped = false;
  double cap_offset_x_mm = 0.0;
  double cap_offset_y_mm = 0.0;
  bool cap_dropped = false;
  bool mounted_ok = false;
  int applied_turns = 0;   // effective 90-degree clockwise fastenings
  int required_turns = 1;  // turns needed to seal
  bool sealed = false;
  int fasten_iter = 0;
  bool at_fasten_end = false;  // wrist sits at the end of the fastening stroke
  ToolFrame frame = ToolFrame::Home;
  SimClock clock;

  void check_invariants(int max_iterations) const {
    if (sealed && !(mounted_ok && applied_turns >= required_turns))
      raise(Errc::physical_order, "sealed without mount or enough turns");
    if (cap_dropped && (mounted_ok || sealed))
      raise(Errc::physical_order, "dropped cap cannot be mounted or sealed");
    if (fasten_iter > max_iterations)
      raise(Errc::physical_order, "fasten iterations exceeded the maximum");
  }
};

// Physical parameters; every value is configuration data.
struct WorldParams {
  double thread_engage_tol_mm = 3.0;  // max-norm offset below which cap threads mesh
  int required_turns_min = 6;
  int required_turns_max = 11;
  int max_iterations = 12;
  double tol_xy_mm = 2.0;   // insertion alignment tolerance (closed, i.e. <=)
  double tol_yaw_deg = 2.0;
  double ft_rate_hz = 60.0;
};

// Ground truth for the rack insertion task.
struct InsertionWorld {
  bool gripper_closed = false;
  bool rack_grasped = false;
  double offset_x_mm = 0.0;
  double offset_y_mm = 0.0;
  double yaw_deg = 0.0;
  bool aligned_ok = false;
  bool inserted_ok = false;
  ToolFrame frame = ToolFrame::Home;
  SimClock clock;

  bool pose_within(const WorldParams& params) const {
    return std::abs(offset_x_mm) <= params.tol_xy_mm && std::abs(offset_y_mm) <= params.tol_xy_mm &&
           std::abs(yaw_deg) <= params.tol_yaw_deg;
  }

  void check_invariants(const WorldParams& params) const {
    if (inserted_ok && !aligned_ok) raise(Errc::physical_order, "inserted without alignment");
    // The alignment flag mirrors the pose tolerances once the rack is at
    // the alignment frame or pressed into the holder.
    if ((frame == ToolFrame::PreInsert || frame == ToolFrame::Contact) &&
        aligned_ok != pose_within(params))
      raise(Errc::physical_order, "aligned_ok disagrees with the pose tolerances");
  }
};

// Offset distributions for deliberate error injection. The protocol runs
// use the wide ranges from the deployment experiments; end-to-end runs
// use the narrow nominal-repeatability ranges. alternate_classes forces
// the alternating proper/improper schedule of the 50-trial protocols.
struct FaultInjection {
  bool enabled = false;
  bool alternate_classes = false;
  double capping_offset_mm = 10.0;   // uniform square half-width, applied at pre-mount
  double insertion_offset_mm = 10.0; // uniform half-width for x and y at pre-insert
  double insertion_yaw_deg = 10.0;   // uniform half-width for yaw at pre-insert

  // Offsets are injected on odd trials when alternating, on all trials
  // otherwise; disabled means exactly zero offsets.
  bool inject(std::uint64_t trial) const {
    if (!enabled) return false;
    if (alternate_classes) return trial % 2 == 1;
    return true;
  }
};

}  // namespace mmbt::sim
