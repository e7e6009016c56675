#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmbt/core/tree.hpp"
#include "mmbt/dsl/diagnostics.hpp"

namespace mmbt::dsl {

struct ValidateOptions {
  // Condition names that deterministically terminate a retry loop; an
  // unbounded repeat containing one of these is not flagged.
  std::set<std::string> terminating_guards = {"max_iter_reached"};

  // When supplied (e.g. from a run configuration), condition modalities
  // outside this set are flagged.
  std::optional<std::set<std::string>> known_modalities;
};

namespace detail {

inline bool subtree_has_guard(const Node& node, const TreeDef& tree,
                              const std::set<std::string>& guards,
                              std::set<std::string>& seen_skills) {
  if (node.kind == NodeKind::Condition && guards.count(node.name)) return true;
  if (node.kind == NodeKind::UseSkill && seen_skills.insert(node.name).second) {
    auto it = tree.skills.find(node.name);
    if (it != tree.skills.end() && subtree_has_guard(it->second, tree, guards, seen_skills))
      return true;
  }
  for (const Node& c : node.children)
    if (subtree_has_guard(c, tree, guards, seen_skills)) return true;
  return false;
}

// A force_success decorator can only return Success (or Running), so in a
// fallback everything after it can never be reached.
inline bool never_fails(const Node& node) {
  return node.kind == NodeKind::Decorator && node.decorator == DecoratorKind::ForceSuccess;
}

inline void lint_node(const Node& node, const TreeDef& tree, const ValidateOptions& options,
                      std::set<std::string>& visited_skills, std::vector<ParseDiagnostic>& out) {
  std::set<std::string> guard_scan;
  if (node.kind == NodeKind::Decorator && node.decorator == DecoratorKind::RepeatUntilSuccess &&
      !node.max_repeats &&
      !subtree_has_guard(node.children.front(), tree, options.terminating_guards, guard_scan)) {
    out.push_back({Severity::Warning, DiagCode::GuardlessRepeat,
                   "unbounded repeat_until_success without a terminating guard condition",
                   {node.pos.line, node.pos.column}});
  }
  if (node.kind == NodeKind::Fallback) {
    bool unreachable = false;
    for (const Node& child : node.children) {
      if (unreachable) {
        out.push_back({Severity::Warning, DiagCode::UnreachableChild,
                       "unreachable fallback child after force_success",
                       {child.pos.line, child.pos.column}});
      }
      if (never_fails(child)) unreachable = true;
    }
  }
  if (node.kind == NodeKind::Condition && options.known_modalities) {
    for (const std::string& m : node.policy.modalities) {
      if (!options.known_modalities->count(m)) {
        out.push_back({Severity::Warning, DiagCode::UnknownModality,
                       "modality '" + m + "' is not in the run configuration",
                       {node.pos.line, node.pos.column}});
      }
    }
  }
  if (node.kind == NodeKind::UseSkill) {
    // Lint each skill once through its first use; the guard lint sees
    // through skill boundaries via expansion below.
    if (visited_skills.insert(node.name).second) {
      auto it = tree.skills.find(node.name);
      if (it != tree.skills.end())
        lint_node(it->second, tree, options, visited_skills, out);
    }
  }
  for (const Node& c : node.children) lint_node(c, tree, options, visited_skills, out);
}

}  // namespace detail

// Static lints over a parsed tree; warnings only, never errors. Expects a
// structurally valid tree (as produced by parse()).
inline std::vector<ParseDiagnostic> validate(const TreeDef& tree,
                                             const ValidateOptions& options = {}) {
  std::vector<ParseDiagnostic> out;
  std::set<std::string> visited;
  detail::lint_node(tree.root, tree, options, visited, out);
  for (const auto& [name, body] : tree.skills) {
    if (visited.insert(name).second) detail::lint_node(body, tree, options, visited, out);
  }
  return out;
}

}  // namespace mmbt::dsl
