#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mmbt/dsl/parse.hpp"
#include "mmbt/dsl/validate.hpp"
#include "mmbt/errors.hpp"
#include "mmbt/sim/tasks.hpp"

namespace mmbt::harness {

// A fully resolved run: configuration values, the parsed tree, and its
// expanded executable form.
struct RunConfig {
  std::string task;  // "capping" | "insertion"
  std::string tree_path;
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  bool strict_eq1 = false;

  sim::WorldParams world;
  sim::FaultInjection faults;
  sim::SurrogateTable surrogates;
  sim::ActionCatalog durations;
  std::map<std::string, fusion::FusionPolicy> fusion_overrides;

  TreeDef tree;
  Node expanded_root;
  std::string digest;  // hash of the effective configuration

  sim::TaskSetup task_setup() const {
    sim::TaskSetup s;
    s.params = world;
    s.faults = faults;
    s.surrogates = surrogates;
    s.durations = durations;
    s.policy_overrides = fusion_overrides;
    s.strict_printed_rule = strict_eq1;
    return s;
  }
};

// Command-line values that override the file.
struct ConfigOverrides {
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<bool> faults_enabled;
};

namespace detail {

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::config, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void collect_leaves(const Node& node, std::set<std::string>& actions,
                           std::set<std::string>& actions_needing_duration,
                           std::map<std::string, fusion::FusionPolicy>& conditions) {
  if (node.kind == NodeKind::Action) {
    actions.insert(node.name);
    if (!node.args.count("dur")) actions_needing_duration.insert(node.name);
  }
  if (node.kind == NodeKind::Condition) conditions.emplace(node.name, node.policy);
  for (const Node& c : node.children) collect_leaves(c, actions, actions_needing_duration, conditions);
}

inline fusion::FusionPolicy policy_from_json(const nlohmann::json& j, const std::string& where) {
  fusion::FusionPolicy p;
  if (!j.contains("modalities") || !j.contains("weights"))
    raise(Errc::config, where + ": policy needs modalities and weights");
  for (const auto& m : j.at("modalities")) p.modalities.push_back(m.get<std::string>());
  for (const auto& w : j.at("weights")) p.weights.push_back(w.get<double>());
  p.threshold = j.value("lambda", 0.5);
  try {
    fusion::check_policy(p);
  } catch (const Error& e) {
    raise(Errc::config, where + ": " + e.what());
  }
  return p;
}

inline std::string format_diagnostics(const std::vector<dsl::ParseDiagnostic>& diags) {
  std::ostringstream out;
  for (const auto& d : diags) {
    out << (d.severity == dsl::Severity::Error ? "error" : "warning") << "["
        << dsl::to_string(d.code) << "] line " << d.span.line << ":" << d.span.column << ": "
        << d.message << "\n";
  }
  return out.str();
}

}  // namespace detail

// Parse a .bt file and fail loudly (with the diagnostics verbatim) unless
// it is error-free.
inline TreeDef load_tree(const std::filesystem::path& path) {
  dsl::ParseResult parsed = dsl::parse(detail::read_file(path));
  if (!parsed.ok())
    raise(Errc::invalid_tree, "'" + path.string() + "'\n" + detail::format_diagnostics(parsed.diagnostics));
  return std::move(*parsed.tree);
}

// Load and validate a run configuration. Relative tree paths resolve
// against the configuration file's directory.
inline RunConfig load_config(const std::filesystem::path& config_path,
                             const ConfigOverrides& overrides = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(config_path));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::config, "'" + config_path.string() + "': " + e.what());
  }

  RunConfig cfg;
  try {
    cfg.task = j.at("task").get<std::string>();
    cfg.tree_path = j.at("tree").get<std::string>();
    cfg.trials = j.value("trials", std::uint64_t{100});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.strict_eq1 = j.value("strict_eq1", false);

    if (j.contains("world")) {
      const auto& w = j.at("world");
      cfg.world.thread_engage_tol_mm = w.value("thread_engage_tol_mm", cfg.world.thread_engage_tol_mm);
      cfg.world.required_turns_min = w.value("required_turns_min", cfg.world.required_turns_min);
      cfg.world.required_turns_max = w.value("required_turns_max", cfg.world.required_turns_max);
      cfg.world.max_iterations = w.value("max_iterations", cfg.world.max_iterations);
      cfg.world.tol_xy_mm = w.value("tol_xy_mm", cfg.world.tol_xy_mm);
      cfg.world.tol_yaw_deg = w.value("tol_yaw_deg", cfg.world.tol_yaw_deg);
      cfg.world.ft_rate_hz = w.value("ft_rate_hz", cfg.world.ft_rate_hz);
    }
    if (j.contains("faults")) {
      const auto& f = j.at("faults");
      cfg.faults.enabled = f.value("enabled", false);
      cfg.faults.alternate_classes = f.value("alternate_classes", false);
      cfg.faults.capping_offset_mm = f.value("capping_offset_mm", cfg.faults.capping_offset_mm);
      cfg.faults.insertion_offset_mm = f.value("insertion_offset_mm", cfg.faults.insertion_offset_mm);
      cfg.faults.insertion_yaw_deg = f.value("insertion_yaw_deg", cfg.faults.insertion_yaw_deg);
    }
    if (j.contains("surrogates")) {
      for (const auto& [modality, spec] : j.at("surrogates").items()) {
        sim::SensorSurrogate s;
        s.accuracy.modality = modality;
        s.accuracy.sensitivity = spec.at("sensitivity").get<double>();
        s.accuracy.specificity = spec.at("specificity").get<double>();
        if (s.accuracy.sensitivity < 0.0 || s.accuracy.sensitivity > 1.0 ||
            s.accuracy.specificity < 0.0 || s.accuracy.specificity > 1.0)
          raise(Errc::config, "surrogate '" + modality + "' rates must be in [0, 1]");
        cfg.surrogates.emplace(modality, s);
      }
    }
    if (j.contains("durations")) {
      for (const auto& [action, secs] : j.at("durations").items()) {
        const double d = secs.get<double>();
        if (d < 0.0) raise(Errc::config, "duration for '" + std::string(action) + "' is negative");
        cfg.durations.emplace(action, d);
      }
    }
    if (j.contains("fusion")) {
      for (const auto& [condition, pj] : j.at("fusion").items()) {
        cfg.fusion_overrides.emplace(condition,
                                     detail::policy_from_json(pj, "fusion." + std::string(condition)));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::config, "'" + config_path.string() + "': " + e.what());
  }

  if (overrides.trials) cfg.trials = *overrides.trials;
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.faults_enabled) cfg.faults.enabled = *overrides.faults_enabled;

  if (cfg.task != "capping" && cfg.task != "insertion")
    raise(Errc::config, "task must be 'capping' or 'insertion', got '" + cfg.task + "'");
  if (cfg.trials == 0) raise(Errc::config, "trials must be positive");
  if (cfg.world.required_turns_min < 1 || cfg.world.required_turns_max < cfg.world.required_turns_min)
    raise(Errc::config, "required_turns range is invalid");
  if (cfg.world.max_iterations < 1) raise(Errc::config, "max_iterations must be positive");
  if (cfg.world.ft_rate_hz <= 0.0) raise(Errc::config, "ft_rate_hz must be positive");

  std::filesystem::path tree_file(cfg.tree_path);
  if (tree_file.is_relative()) tree_file = config_path.parent_path() / tree_file;
  cfg.tree = load_tree(tree_file);
  cfg.expanded_root = expand(cfg.tree);

  // Cross-checks between the tree and the configuration.
  std::set<std::string> actions;
  std::set<std::string> need_duration;
  std::map<std::string, fusion::FusionPolicy> conditions;
  detail::collect_leaves(cfg.expanded_root, actions, need_duration, conditions);
  for (const std::string& a : need_duration) {
    if (!cfg.durations.count(a)) raise(Errc::config, "no duration configured for action '" + a + "'");
  }
  for (const auto& [name, policy] : cfg.fusion_overrides) {
    if (!conditions.count(name))
      raise(Errc::config, "fusion override for unknown condition '" + name + "'");
  }
  for (auto& [name, policy] : conditions) {
    const fusion::FusionPolicy& effective =
        cfg.fusion_overrides.count(name) ? cfg.fusion_overrides.at(name) : policy;
    for (const std::string& m : effective.modalities) {
      if (m != sim::kStateModality && !cfg.surrogates.count(m))
        raise(Errc::config, "condition '" + name + "' uses modality '" + m + "' with no surrogate");
    }
  }

  // Digest of the effective run (file values plus overrides), so reports
  // from the same logical run compare equal byte-for-byte.
  nlohmann::json effective = j;
  effective["trials"] = cfg.trials;
  effective["seed"] = cfg.seed;
  effective["faults"]["enabled"] = cfg.faults.enabled;
  cfg.digest = detail::fnv1a_hex(effective.dump());
  return cfg;
}

}  // namespace mmbt::harness
