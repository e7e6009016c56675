// mmbt: run seeded Monte Carlo trials of the lab task simulator, validate
// task trees, query the fusion oracle and dump single-trial traces.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mmbt/mmbt.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct RunArgs {
  std::string task;
  std::string config_path;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::string faults;  // "", "on", "off"
  std::string out_path;
  std::string trace_path;
  unsigned jobs = 1;
};

mmbt::harness::RunConfig load(const RunArgs& args) {
  mmbt::harness::ConfigOverrides ov;
  ov.trials = args.trials;
  ov.seed = args.seed;
  if (args.faults == "on") ov.faults_enabled = true;
  if (args.faults == "off") ov.faults_enabled = false;
  auto cfg = mmbt::harness::load_config(args.config_path, ov);
  if (!args.task.empty() && args.task != cfg.task) {
    mmbt::raise(mmbt::Errc::config,
                "--task " + args.task + " does not match the configured task '" + cfg.task + "'");
  }
  return cfg;
}

void print_summary(const mmbt::harness::RunSummary& s) {
  std::printf("trials            %llu\n", static_cast<unsigned long long>(s.trials));
  std::printf("success_rate      %.4f\n", s.success_rate);
  std::printf("wilson_95         [%.4f, %.4f]\n", s.wilson_95.lo, s.wilson_95.hi);
  std::printf("mean_duration_s   %.3f (stddev %.3f)\n", s.mean_duration_s, s.stddev_duration_s);
  if (s.mean_fasten_iterations > 0.0)
    std::printf("mean_fasten_iter  %.3f\n", s.mean_fasten_iterations);
  std::printf("outcomes         ");
  for (const auto& [name, count] : s.outcome_histogram)
    std::printf(" %s=%llu", name.c_str(), static_cast<unsigned long long>(count));
  std::printf("\n");
  for (const auto& [condition, acc] : s.condition_accuracy) {
    std::printf("condition %-18s accuracy %.4f (%llu/%llu)\n", condition.c_str(), acc.rate(),
                static_cast<unsigned long long>(acc.correct),
                static_cast<unsigned long long>(acc.total));
  }
}

int cmd_run(const RunArgs& args) {
  auto cfg = load(args);
  auto result = mmbt::harness::run_trials(cfg, args.jobs);
  print_summary(result.summary);

  if (!args.out_path.empty()) {
    mmbt::harness::write_file(args.out_path, mmbt::harness::render_report(result.summary));
    std::printf("report written to %s\n", args.out_path.c_str());
  }
  if (!args.trace_path.empty()) {
    // Re-run with tracing per trial; streams are per-trial so the traced
    // run reproduces the untraced outcomes exactly.
    std::string body;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      mmbt::Tracer tracer;
      mmbt::harness::run_one_trial(cfg, t, &tracer);
      body += mmbt::harness::render_trace(tracer.events());
    }
    mmbt::harness::write_file(args.trace_path, body);
    std::printf("trace written to %s\n", args.trace_path.c_str());
  }
  return 0;
}

int cmd_validate(const std::string& tree_path) {
  auto text = mmbt::harness::detail::read_file(tree_path);
  auto parsed = mmbt::dsl::parse(text);
  auto print_diags = [](const std::vector<mmbt::dsl::ParseDiagnostic>& diags) {
    for (const auto& d : diags) {
      std::printf("%s[%s] line %d:%d: %s\n",
                  d.severity == mmbt::dsl::Severity::Error ? "error" : "warning",
                  mmbt::dsl::to_string(d.code), d.span.line, d.span.column, d.message.c_str());
    }
  };
  print_diags(parsed.diagnostics);
  if (!parsed.ok()) return kExitConfig;
  auto warnings = mmbt::dsl::validate(*parsed.tree);
  print_diags(warnings);
  std::printf("ok: tree '%s' (%zu skills, %zu warnings)\n", parsed.tree->name.c_str(),
              parsed.tree->skills.size(), warnings.size());
  return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& condition, double prior) {
  auto cfg = mmbt::harness::load_config(config_path);

  std::set<std::string> actions, need_dur;
  std::map<std::string, mmbt::fusion::FusionPolicy> conditions;
  mmbt::harness::detail::collect_leaves(cfg.expanded_root, actions, need_dur, conditions);
  auto it = conditions.find(condition);
  if (it == conditions.end())
    mmbt::raise(mmbt::Errc::config, "condition '" + condition + "' is not in the tree");
  const mmbt::fusion::FusionPolicy& policy =
      cfg.fusion_overrides.count(condition) ? cfg.fusion_overrides.at(condition) : it->second;

  std::vector<mmbt::fusion::ModalityAccuracy> accuracies;
  for (const std::string& m : policy.modalities) {
    if (m == mmbt::sim::kStateModality) {
      accuracies.push_back({m, 1.0, 1.0});
    } else {
      accuracies.push_back(cfg.surrogates.at(m).accuracy);
    }
  }
  auto fused = mmbt::fusion::fused_accuracy(policy, accuracies, prior, cfg.strict_eq1);
  nlohmann::json j;
  j["condition"] = condition;
  j["sensitivity"] = fused.sensitivity;
  j["specificity"] = fused.specificity;
  j["accuracy"] = fused.accuracy;
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int cmd_trace(const RunArgs& args, std::uint64_t trial_index) {
  auto cfg = load(args);
  mmbt::Tracer tracer;
  auto report = mmbt::harness::run_one_trial(cfg, trial_index, &tracer);
  std::string body = mmbt::harness::render_trace(tracer.events());
  if (args.out_path.empty()) {
    std::fputs(body.c_str(), stdout);
  } else {
    mmbt::harness::write_file(args.out_path, body);
  }
  std::fprintf(stderr, "trial %llu: bt=%s truth=%s outcome=%s duration=%.3fs\n",
               static_cast<unsigned long long>(trial_index),
               report.bt_success ? "success" : "failure",
               report.truth_success ? "success" : "failure",
               mmbt::harness::to_string(report.outcome), report.duration_s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multimodal behaviour-tree lab task simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  std::uint64_t trial_index = 0;
  std::string tree_path;
  std::string oracle_config;
  std::string oracle_condition;
  double oracle_prior = 0.5;

  auto add_common = [&](CLI::App* cmd, bool need_seed) {
    cmd->add_option("--task", run_args.task, "task name (cross-checked against the config)");
    cmd->add_option("--config", run_args.config_path, "run configuration file")->required();
    cmd->add_option("--trials", [&run_args](const CLI::results_t& r) {
      run_args.trials = std::stoull(r[0]);
      return true;
    }, "trial count override");
    auto* seed_opt = cmd->add_option("--seed", [&run_args](const CLI::results_t& r) {
      run_args.seed = std::stoull(r[0]);
      return true;
    }, "RNG seed override");
    if (need_seed) seed_opt->required();
    cmd->add_option("--faults", run_args.faults, "fault injection on|off")
        ->check(CLI::IsMember({"on", "off"}));
  };

  auto* run_cmd = app.add_subcommand("run", "run seeded Monte Carlo trials");
  add_common(run_cmd, false);
  run_cmd->add_option("--out", run_args.out_path, "write the canonical report here");
  run_cmd->add_option("--trace", run_args.trace_path, "write per-trial traces here");
  run_cmd->add_option("--jobs", run_args.jobs, "worker threads")->check(CLI::Range(1u, 256u));

  auto* validate_cmd = app.add_subcommand("validate", "parse and lint a tree file");
  validate_cmd->add_option("--tree", tree_path, ".bt file")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "exact fused accuracy of one condition");
  oracle_cmd->add_option("--config", oracle_config, "run configuration file")->required();
  oracle_cmd->add_option("--condition", oracle_condition, "condition name")->required();
  oracle_cmd->add_option("--prior", oracle_prior, "prior P(phase succeeded)")
      ->check(CLI::Range(0.0, 1.0));

  auto* trace_cmd = app.add_subcommand("trace", "run one trial with tracing");
  add_common(trace_cmd, true);
  trace_cmd->add_option("--trial", trial_index, "trial index within the seeded run");
  trace_cmd->add_option("--out", run_args.out_path, "trace output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_args);
    if (validate_cmd->parsed()) return cmd_validate(tree_path);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_config, oracle_condition, oracle_prior);
    if (trace_cmd->parsed()) return cmd_trace(run_args, trial_index);
  } catch (const mmbt::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return (e.code() == mmbt::Errc::config || e.code() == mmbt::Errc::invalid_tree) ? kExitConfig
                                                                                    : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
