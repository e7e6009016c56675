#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "mmbt/sim/signal.hpp"
#include "mmbt/sim/surrogate.hpp"
#include "mmbt/sim/tasks.hpp"

using namespace mmbt;
using sim::CappingTask;
using sim::InsertionTask;
using sim::TaskSetup;

namespace {

double channel_mean(const TimeSeries& s, std::size_t c) {
  double sum = 0.0;
  for (std::size_t f = 0; f < s.frames(); ++f) sum += s.at(f, c);
  return sum / static_cast<double>(s.frames());
}

double channel_variance(const TimeSeries& s, std::size_t c) {
  const double m = channel_mean(s, c);
  double acc = 0.0;
  for (std::size_t f = 0; f < s.frames(); ++f) acc += (s.at(f, c) - m) * (s.at(f, c) - m);
  return acc / static_cast<double>(s.frames());
}

TaskSetup perfect_setup() {
  TaskSetup setup;
  for (const char* m : {"vision_mount", "ft_mount", "tactile_mount", "ft_fasten", "tactile_fasten",
                        "vision_align", "depth_align", "ft_insert", "vision_insert"})
    setup.surrogates[m] = {{m, 1.0, 1.0}};
  for (const char* a :
       {"move_to_prepick", "move_to_pick", "move_home", "move_to_premount", "move_until_contact",
        "open_gripper", "close_gripper", "capture_rgb", "capture_depth", "rotate_cw_90",
        "rotate_ccw_90", "inc_fasten_iter", "move_to_preinsert"})
    setup.durations[a] = 1.0;
  return setup;
}

// Drive a task through a scripted action list.
template <typename Task>
void run_actions(Task&, Env& env, const std::vector<std::string>& actions) {
  for (const auto& a : actions) {
    INFO("action " << a);
    REQUIRE(env.action(a, {}, env) == NodeStatus::Success);
  }
}

const std::vector<std::string> kGraspThenMount = {
    "move_to_prepick", "move_to_pick", "close_gripper", "move_to_prepick",
    "move_home",       "move_to_premount", "move_until_contact"};

}  // namespace

TEST_CASE("zero-centering and smoothing behave as specified") {
  Rng rng(7);
  TimeSeries noise = sim::synth_ft_trace(2.0, 60.0, false, rng);

  SECTION("centered series has per-channel mean within 1e-9") {
    TimeSeries centered = sim::zero_center(noise);
    for (std::size_t c = 0; c < centered.channels; ++c)
      CHECK(std::abs(channel_mean(centered, c)) <= 1e-9);
  }
  SECTION("window 1 is the identity on centered data") {
    TimeSeries centered = sim::zero_center(noise);
    CHECK(sim::preprocess_ft(noise, 1) == centered);
  }
  SECTION("constant series maps to all zeros") {
    TimeSeries constant;
    constant.channels = 2;
    constant.sample_period_s = 0.1;
    constant.data.assign(40, 3.25);
    TimeSeries out = sim::preprocess_ft(constant, 5);
    for (double v : out.data) CHECK(std::abs(v) <= 1e-12);
  }
  SECTION("window-5 smoothing strictly reduces white-noise variance") {
    TimeSeries smoothed = sim::preprocess_ft(noise, 5);
    TimeSeries centered = sim::zero_center(noise);
    for (std::size_t c = 0; c < noise.channels; ++c)
      CHECK(channel_variance(smoothed, c) < channel_variance(centered, c));
    // The shrinking boundary windows re-weight edge samples, so smoothing
    // shifts the mean by O(sigma * window / length); bound it accordingly.
    for (std::size_t c = 0; c < smoothed.channels; ++c)
      CHECK(std::abs(channel_mean(smoothed, c)) <= 1e-3);
  }
  SECTION("bad windows are rejected") {
    CHECK_THROWS_MATCHES(sim::moving_average(noise, 0), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::bad_window; }));
    CHECK_THROWS_AS(sim::moving_average(noise, noise.frames() + 1), Error);
  }
}

TEST_CASE("synthetic traces have the requested shape and are seeded") {
  Rng a(123), b(123), c(124);
  TimeSeries s1 = sim::synth_ft_trace(2.0, 60.0, false, a);
  CHECK(s1.frames() == 120);
  CHECK(s1.channels == 6);
  CHECK(s1.sample_period_s == 1.0 / 60.0);

  TimeSeries s2 = sim::synth_ft_trace(2.0, 60.0, false, b);
  CHECK(s1 == s2);  // same seed, same series
  TimeSeries s3 = sim::synth_ft_trace(2.0, 60.0, false, c);
  CHECK_FALSE(s1 == s3);

  // With identical draws, the contact series differs from the no-contact
  // series by exactly the deterministic bump.
  Rng d(123);
  TimeSeries contact = sim::synth_ft_trace(2.0, 60.0, true, d);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < contact.data.size(); ++i)
    max_diff = std::max(max_diff, std::abs(contact.data[i] - s1.data[i]));
  CHECK(max_diff > 1.0);  // bump present
}

TEST_CASE("surrogates follow their confusion model") {
  Rng rng(555);
  SECTION("perfect sensor always matches the truth") {
    sim::SensorSurrogate s{{"m", 1.0, 1.0}};
    for (int i = 0; i < 100; ++i) {
      CHECK(s.sample(true, rng) == 1);
      CHECK(s.sample(false, rng) == 0);
    }
  }
  SECTION("degenerate sensor votes success unconditionally") {
    sim::SensorSurrogate s{{"m", 1.0, 0.0}};
    for (int i = 0; i < 100; ++i) {
      CHECK(s.sample(true, rng) == 1);
      CHECK(s.sample(false, rng) == 1);
    }
  }
  SECTION("agreement rates converge to the deployment accuracies") {
    const double rates[3] = {0.88, 0.96, 0.82};
    for (double rate : rates) {
      sim::SensorSurrogate s{{"m", rate, rate}};
      const int n = 100000;
      int agree = 0;
      for (int i = 0; i < n; ++i) {
        const bool truth = i % 2 == 0;
        const int vote = s.sample(truth, rng);
        if (vote == (truth ? 1 : 0)) ++agree;
      }
      const double empirical = static_cast<double>(agree) / n;
      const double sigma = std::sqrt(rate * (1.0 - rate) / n);
      CHECK_THAT(empirical, Catch::Matchers::WithinAbs(rate, 3.0 * sigma));
    }
  }
}

TEST_CASE("sense draws one vote per modality in policy order") {
  fusion::FusionPolicy policy;
  policy.modalities = {"state", "vision_mount"};
  policy.weights = {0.5, 0.5};
  sim::SurrogateTable table;
  table["vision_mount"] = {{"vision_mount", 1.0, 1.0}};

  Rng rng(1);
  auto votes = sim::sense(true, policy, table, rng);
  REQUIRE(votes.size() == 2);
  CHECK(votes[0].modality == "state");
  CHECK(votes[0].vote == 1);  // deterministic world read
  CHECK(votes[1].vote == 1);

  sim::SurrogateTable empty;
  fusion::FusionPolicy p2;
  p2.modalities = {"ghost"};
  p2.weights = {1.0};
  CHECK_THROWS_MATCHES(sim::sense(true, p2, empty, rng), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::no_surrogate; }));
}

TEST_CASE("capping actions update the world per the task physics") {
  TaskSetup setup = perfect_setup();

  SECTION("clean mount and three turns seal a three-turn cap") {
    CappingTask task(setup, Rng(9), 0);
    task.world().required_turns = 3;
    Env env;
    task.bind(env);
    run_actions(task, env, kGraspThenMount);
    CHECK(task.world().cap_grasped);
    CHECK(task.world().mounted_ok);

    for (int turn = 0; turn < 3; ++turn) {
      if (turn > 0) run_actions(task, env, {"rotate_ccw_90", "close_gripper"});
      run_actions(task, env, {"rotate_cw_90", "open_gripper", "inc_fasten_iter"});
    }
    CHECK(task.world().applied_turns == 3);
    CHECK(task.world().sealed);
    CHECK(task.world().fasten_iter == 3);
  }

  SECTION("an offset beyond tolerance fails the mount and drops the cap") {
    CappingTask task(setup, Rng(9), 0);
    Env env;
    task.bind(env);
    run_actions(task, env, {"move_to_prepick", "move_to_pick", "close_gripper", "move_home",
                            "move_to_premount"});
    task.world().cap_offset_x_mm = 9.0;
    task.world().cap_offset_y_mm = 9.0;
    run_actions(task, env, {"move_until_contact"});
    CHECK_FALSE(task.world().mounted_ok);

    run_actions(task, env, {"open_gripper"});
    CHECK(task.world().cap_dropped);
    CHECK_FALSE(task.world().cap_grasped);

    // Turns no longer accumulate without a meshed cap.
    run_actions(task, env, {"close_gripper", "rotate_cw_90"});
    CHECK(task.world().applied_turns == 0);
  }

  SECTION("the engagement tolerance is closed") {
    CappingTask task(setup, Rng(9), 0);
    Env env;
    task.bind(env);
    run_actions(task, env, {"move_to_prepick", "move_to_pick", "close_gripper",
                            "move_to_premount"});
    task.world().cap_offset_x_mm = setup.params.thread_engage_tol_mm;  // exactly at tol
    task.world().cap_offset_y_mm = -setup.params.thread_engage_tol_mm;
    run_actions(task, env, {"move_until_contact"});
    CHECK(task.world().mounted_ok);
  }

  SECTION("physically impossible orders raise") {
    CappingTask task(setup, Rng(9), 0);
    Env env;
    task.bind(env);
    run_actions(task, env, kGraspThenMount);
    run_actions(task, env, {"open_gripper"});
    CHECK_THROWS_MATCHES(env.action("rotate_cw_90", {}, env), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::physical_order; }));

    CappingTask task2(setup, Rng(9), 0);
    Env env2;
    task2.bind(env2);
    CHECK_THROWS_AS(env2.action("move_until_contact", {}, env2), Error);  // not at pre-mount

    CHECK_THROWS_MATCHES(env2.action("warp_drive", {}, env2), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::unknown_handler; }));
  }

  SECTION("every action advances the clock by its configured duration") {
    CappingTask task(setup, Rng(9), 0);
    Env env;
    task.bind(env);
    run_actions(task, env, {"move_to_prepick", "move_to_pick", "close_gripper"});
    CHECK_THAT(env.clock.now(), Catch::Matchers::WithinAbs(3.0, 1e-12));
    Args args;
    args["dur"] = 2.0;
    env.action("record_ft", args, env);
    CHECK_THAT(env.clock.now(), Catch::Matchers::WithinAbs(5.0, 1e-12));
    CHECK(env.blackboard.get_as<TimeSeries>("ft_trace").frames() == 120);
  }
}

TEST_CASE("capping conditions read the declared ground truths") {
  TaskSetup setup = perfect_setup();
  CappingTask task(setup, Rng(11), 0);
  Env env;
  task.bind(env);

  fusion::FusionPolicy state;
  state.modalities = {"state"};
  state.weights = {1.0};

  CHECK(env.condition("gripper_open", state, env) == NodeStatus::Success);
  run_actions(task, env, {"move_to_prepick", "move_to_pick", "close_gripper"});
  CHECK(env.condition("gripper_open", state, env) == NodeStatus::Failure);
  CHECK(env.condition("max_iter_reached", state, env) == NodeStatus::Failure);
  CHECK(env.condition("at_fasten_end", state, env) == NodeStatus::Failure);
  CHECK(env.condition("fully_capped", state, env) == NodeStatus::Failure);

  CHECK_THROWS_MATCHES(env.condition("is_teatime", state, env), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::unknown_handler; }));

  // Sensing must not mutate the world.
  const auto before = task.world();
  fusion::FusionPolicy mount;
  mount.modalities = {"vision_mount", "ft_mount", "tactile_mount"};
  mount.weights = {0.3308, 0.3609, 0.3083};
  env.condition("mount_aligned", mount, env);
  const auto& after = task.world();
  CHECK(before.mounted_ok == after.mounted_ok);
  CHECK(before.cap_grasped == after.cap_grasped);
  CHECK(before.fasten_iter == after.fasten_iter);
  CHECK(before.frame == after.frame);
}

TEST_CASE("insertion actions and tolerances") {
  TaskSetup setup = perfect_setup();

  SECTION("clean approach aligns and inserts") {
    InsertionTask task(setup, Rng(3), 0);
    Env env;
    task.bind(env);
    run_actions(task, env, {"move_to_prepick", "move_to_pick", "close_gripper", "move_home",
                            "move_to_preinsert", "move_until_contact"});
    CHECK(task.world().aligned_ok);
    CHECK(task.world().inserted_ok);
  }

  SECTION("yaw beyond tolerance blocks insertion") {
    TaskSetup faulty = setup;
    faulty.faults.enabled = true;
    faulty.faults.insertion_offset_mm = 0.0;
    faulty.faults.insertion_yaw_deg = 0.0;
    InsertionTask task(faulty, Rng(3), 0);
    Env env;
    task.bind(env);
    run_actions(task, env, {"move_to_prepick", "move_to_pick", "close_gripper",
                            "move_to_preinsert"});
    task.world().yaw_deg = 5.0;  // tol is 2 degrees
    task.world().aligned_ok = false;
    run_actions(task, env, {"move_until_contact"});
    CHECK_FALSE(task.world().inserted_ok);
  }

  SECTION("offsets exactly at tolerance still align (closed bounds)") {
    InsertionTask task(setup, Rng(3), 0);
    Env env;
    task.bind(env);
    run_actions(task, env, {"move_to_prepick", "move_to_pick", "close_gripper",
                            "move_to_preinsert"});
    task.world().offset_x_mm = setup.params.tol_xy_mm;
    task.world().offset_y_mm = setup.params.tol_xy_mm;
    task.world().yaw_deg = setup.params.tol_yaw_deg;
    task.world().aligned_ok = true;
    run_actions(task, env, {"move_until_contact"});
    CHECK(task.world().inserted_ok);
  }

  SECTION("contact from anywhere but pre-insert is rejected") {
    InsertionTask task(setup, Rng(3), 0);
    Env env;
    task.bind(env);
    CHECK_THROWS_AS(env.action("move_until_contact", {}, env), Error);
  }
}

TEST_CASE("fault injection obeys the enable and alternation switches") {
  TaskSetup setup = perfect_setup();

  SECTION("disabled means exactly zero offsets") {
    setup.faults.enabled = false;
    InsertionTask task(setup, Rng(5), 1);
    Env env;
    task.bind(env);
    run_actions(task, env, {"move_to_preinsert"});
    CHECK(task.world().offset_x_mm == 0.0);
    CHECK(task.world().offset_y_mm == 0.0);
    CHECK(task.world().yaw_deg == 0.0);
  }

  SECTION("alternation injects on odd trials only") {
    setup.faults.enabled = true;
    setup.faults.alternate_classes = true;
    setup.faults.insertion_offset_mm = 10.0;
    setup.faults.insertion_yaw_deg = 10.0;

    InsertionTask even(setup, Rng(5), 0);
    Env env_even;
    even.bind(env_even);
    run_actions(even, env_even, {"move_to_preinsert"});
    CHECK(even.world().offset_x_mm == 0.0);

    int nonzero = 0;
    for (std::uint64_t t = 1; t < 20; t += 2) {
      InsertionTask odd(setup, Rng::stream(5, t), t);
      Env env_odd;
      odd.bind(env_odd);
      run_actions(odd, env_odd, {"move_to_preinsert"});
      if (std::abs(odd.world().offset_x_mm) > 1e-12) ++nonzero;
    }
    CHECK(nonzero >= 9);  // uniform(-10,10) draws are almost never exactly 0
  }
}
