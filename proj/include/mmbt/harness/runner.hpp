#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "mmbt/core/engine.hpp"
#include "mmbt/harness/config.hpp"
#include "mmbt/harness/stats.hpp"
#include "mmbt/rng.hpp"
#include "mmbt/sim/tasks.hpp"

namespace mmbt::harness {

// bt_verdict crossed with ground truth. FalseSuccess is the tree claiming
// success while the world disagrees; DetectedFailure covers every failure
// the tree correctly reported, including the max-iteration bailout.
enum class OutcomeClass { TrueSuccess, FalseSuccess, DetectedFailure, FalseFailure };

inline const char* to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::TrueSuccess: return "TrueSuccess";
    case OutcomeClass::FalseSuccess: return "FalseSuccess";
    case OutcomeClass::DetectedFailure: return "DetectedFailure";
    case OutcomeClass::FalseFailure: return "FalseFailure";
  }
  return "?";
}

inline OutcomeClass classify_outcome(bool bt_success, bool truth_success) {
  if (bt_success) return truth_success ? OutcomeClass::TrueSuccess : OutcomeClass::FalseSuccess;
  return truth_success ? OutcomeClass::FalseFailure : OutcomeClass::DetectedFailure;
}

struct TrialReport {
  std::uint64_t trial = 0;
  bool bt_success = false;
  bool truth_success = false;
  OutcomeClass outcome = OutcomeClass::DetectedFailure;
  double duration_s = 0.0;
  int fasten_iterations = 0;  // capping only
  std::vector<sim::VoteLogEntry> votes;
};

struct ConditionAccuracy {
  std::uint64_t correct = 0;
  std::uint64_t total = 0;

  double rate() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct RunSummary {
  std::uint64_t trials = 0;
  std::uint64_t true_successes = 0;
  double success_rate = 0.0;
  Interval wilson_95;
  double mean_duration_s = 0.0;
  double stddev_duration_s = 0.0;
  double mean_fasten_iterations = 0.0;
  std::map<std::string, std::uint64_t> outcome_histogram;  // all four classes, always present
  std::map<std::string, ConditionAccuracy> condition_accuracy;
  std::string config_digest;
  std::uint64_t seed = 0;
};

// Run a single trial: fresh world, fresh RNG stream derived from
// (seed, trial), tree ticked to completion. Pass a tracer to record it.
inline TrialReport run_one_trial(const RunConfig& cfg, std::uint64_t trial,
                                 Tracer* tracer = nullptr) {
  Env env;
  env.tracer = tracer;
  TreeRuntime runtime(cfg.expanded_root);

  Rng rng = Rng::stream(cfg.seed, trial);
  TrialReport report;
  report.trial = trial;

  const auto setup = cfg.task_setup();
  // Tick to completion: re-tick the root while it reports Running. The
  // shipped task trees finish in one root tick; the bound protects
  // against synthetic trees that never settle.
  constexpr int kMaxRootTicks = 100000;
  if (cfg.task == "capping") {
    sim::CappingTask task(setup, std::move(rng), trial);
    task.bind(env);
    NodeStatus status = NodeStatus::Running;
    for (int i = 0; i < kMaxRootTicks && status == NodeStatus::Running; ++i) status = runtime.tick(env);
    if (status == NodeStatus::Running) raise(Errc::tick_budget_exceeded, "root never settled");
    report.bt_success = status == NodeStatus::Success;
    report.truth_success = task.world().sealed;
    report.fasten_iterations = task.world().fasten_iter;
    report.votes = task.vote_log();
  } else {
    sim::InsertionTask task(setup, std::move(rng), trial);
    task.bind(env);
    NodeStatus status = NodeStatus::Running;
    for (int i = 0; i < kMaxRootTicks && status == NodeStatus::Running; ++i) status = runtime.tick(env);
    if (status == NodeStatus::Running) raise(Errc::tick_budget_exceeded, "root never settled");
    report.bt_success = status == NodeStatus::Success;
    report.truth_success = task.world().inserted_ok;
    report.votes = task.vote_log();
  }
  report.outcome = classify_outcome(report.bt_success, report.truth_success);
  report.duration_s = env.clock.now();
  return report;
}

// Aggregate statistics; a pure function of the trial list (plus run
// identity fields), so worker count and scheduling cannot influence it.
inline RunSummary summarize(const std::vector<TrialReport>& trials, const std::string& config_digest,
                            std::uint64_t seed) {
  if (trials.empty()) raise(Errc::empty_input, "no trials to summarize");

  RunSummary s;
  s.trials = trials.size();
  s.config_digest = config_digest;
  s.seed = seed;
  for (OutcomeClass c : {OutcomeClass::TrueSuccess, OutcomeClass::FalseSuccess,
                         OutcomeClass::DetectedFailure, OutcomeClass::FalseFailure})
    s.outcome_histogram[to_string(c)] = 0;

  std::vector<double> durations;
  durations.reserve(trials.size());
  double fasten_sum = 0.0;
  for (const TrialReport& t : trials) {
    ++s.outcome_histogram[to_string(t.outcome)];
    durations.push_back(t.duration_s);
    fasten_sum += t.fasten_iterations;
    for (const auto& v : t.votes) {
      auto& acc = s.condition_accuracy[v.condition];
      ++acc.total;
      if (v.verdict == v.truth) ++acc.correct;
    }
  }
  s.true_successes = s.outcome_histogram[to_string(OutcomeClass::TrueSuccess)];
  s.success_rate = static_cast<double>(s.true_successes) / static_cast<double>(s.trials);
  s.wilson_95 = wilson_interval(s.true_successes, s.trials);
  s.mean_duration_s = mean(durations);
  s.stddev_duration_s = stddev(durations);
  s.mean_fasten_iterations = fasten_sum / static_cast<double>(s.trials);
  return s;
}

struct RunResult {
  RunSummary summary;
  std::vector<TrialReport> trials;
};

// Seeded Monte Carlo run. Trials own independent RNG streams, so any
// worker count produces the same per-trial results; reports come back
// sorted by trial index.
inline RunResult run_trials(const RunConfig& cfg, unsigned jobs = 1) {
  std::vector<TrialReport> reports(cfg.trials);
  if (jobs <= 1) {
    for (std::uint64_t t = 0; t < cfg.trials; ++t) reports[t] = run_one_trial(cfg, t);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w]() {
        try {
          for (std::uint64_t t = w; t < cfg.trials; t += jobs) reports[t] = run_one_trial(cfg, t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : workers) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  RunResult result;
  result.summary = summarize(reports, cfg.digest, cfg.seed);
  result.trials = std::move(reports);
  return result;
}

}  // namespace mmbt::harness
