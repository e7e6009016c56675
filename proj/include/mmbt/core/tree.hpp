#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mmbt/errors.hpp"
#include "mmbt/fusion/fusion.hpp"

namespace mmbt {

enum class NodeKind { Sequence, Fallback, Parallel, Decorator, Action, Condition, UseSkill };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Sequence: return "sequence";
    case NodeKind::Fallback: return "fallback";
    case NodeKind::Parallel: return "parallel";
    case NodeKind::Decorator: return "decorator";
    case NodeKind::Action: return "action";
    case NodeKind::Condition: return "condition";
    case NodeKind::UseSkill: return "use_skill";
  }
  return "?";
}

enum class DecoratorKind { Inverter, RepeatUntilSuccess, ForceSuccess };

inline const char* to_string(DecoratorKind k) {
  switch (k) {
    case DecoratorKind::Inverter: return "inverter";
    case DecoratorKind::RepeatUntilSuccess: return "repeat_until_success";
    case DecoratorKind::ForceSuccess: return "force_success";
  }
  return "?";
}

// Action arguments are either numbers or bare names.
using ArgValue = std::variant<double, std::string>;
using Args = std::map<std::string, ArgValue>;

struct SourcePos {
  int line = 0;    // 1-based; 0 = not from source text
  int column = 0;
};

struct Node {
  std::string id;  // unique within the tree; derived from position
  NodeKind kind = NodeKind::Sequence;
  std::vector<Node> children;

  // Decorator
  DecoratorKind decorator = DecoratorKind::Inverter;
  std::optional<std::uint32_t> max_repeats;  // RepeatUntilSuccess; empty = unbounded

  // Action / Condition / UseSkill
  std::string name;
  Args args;                     // action only
  fusion::FusionPolicy policy;   // condition only

  SourcePos pos;

  bool is_leaf() const {
    return kind == NodeKind::Action || kind == NodeKind::Condition || kind == NodeKind::UseSkill;
  }

  friend bool operator==(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.name != b.name) return false;
    switch (a.kind) {
      case NodeKind::Decorator:
        if (a.decorator != b.decorator || a.max_repeats != b.max_repeats) return false;
        break;
      case NodeKind::Action:
        if (a.args != b.args) return false;
        break;
      case NodeKind::Condition:
        if (a.policy.modalities != b.policy.modalities || a.policy.weights != b.policy.weights ||
            a.policy.threshold != b.policy.threshold)
          return false;
        break;
      default:
        break;
    }
    return a.children == b.children;
  }
};

// A named tree plus its reusable skill subtrees. Skills may reference each
// other as long as resolution stays acyclic.
struct TreeDef {
  std::string name;
  Node root;
  std::map<std::string, Node> skills;

  friend bool operator==(const TreeDef& a, const TreeDef& b) {
    return a.name == b.name && a.root == b.root && a.skills == b.skills;
  }
};

namespace detail {

inline std::string child_id(const std::string& parent, std::size_t index) {
  return (parent == "/" ? "" : parent) + "/" + std::to_string(index);
}

inline void assign_ids(Node& node, const std::string& id) {
  node.id = id;
  for (std::size_t i = 0; i < node.children.size(); ++i)
    assign_ids(node.children[i], child_id(id, i));
}

inline void check_node(const Node& node, std::set<std::string>& seen) {
  if (!seen.insert(node.id).second)
    raise(Errc::invalid_tree, "duplicate node id '" + node.id + "'");
  switch (node.kind) {
    case NodeKind::Sequence:
    case NodeKind::Fallback:
    case NodeKind::Parallel:
      if (node.children.empty())
        raise(Errc::invalid_tree, std::string(to_string(node.kind)) + " needs at least one child");
      break;
    case NodeKind::Decorator:
      if (node.children.size() != 1) raise(Errc::invalid_tree, "decorator needs exactly one child");
      if (node.max_repeats && *node.max_repeats == 0)
        raise(Errc::invalid_tree, "max_repeats must be positive");
      break;
    case NodeKind::Action:
    case NodeKind::Condition:
    case NodeKind::UseSkill:
      if (!node.children.empty()) raise(Errc::invalid_tree, "leaf nodes take no children");
      if (node.kind == NodeKind::Condition) fusion::check_policy(node.policy);
      break;
  }
  for (const Node& c : node.children) check_node(c, seen);
}

inline void collect_skill_refs(const Node& node, std::set<std::string>& out) {
  if (node.kind == NodeKind::UseSkill) out.insert(node.name);
  for (const Node& c : node.children) collect_skill_refs(c, out);
}

}  // namespace detail

// Recompute positional node ids ("/", "/0", "/0/1", ...). Skill bodies are
// prefixed "@name" so ids stay unique across the whole definition.
inline void reassign_ids(TreeDef& tree) {
  detail::assign_ids(tree.root, "/");
  for (auto& [name, body] : tree.skills) detail::assign_ids(body, "@" + name);
}

// Structure and policy invariants for programmatically built trees; the
// DSL parser reports the same conditions as diagnostics instead.
inline void check_tree(const TreeDef& tree) {
  std::set<std::string> seen;
  detail::check_node(tree.root, seen);
  for (const auto& [name, body] : tree.skills) detail::check_node(body, seen);

  // Skill references resolve and are acyclic.
  std::set<std::string> resolved;
  std::set<std::string> in_progress;
  // Depth-first resolution over the skill reference graph.
  auto resolve = [&](auto&& self, const std::string& name) -> void {
    if (resolved.count(name)) return;
    if (!in_progress.insert(name).second)
      raise(Errc::invalid_tree, "skill cycle through '" + name + "'");
    auto it = tree.skills.find(name);
    if (it == tree.skills.end()) raise(Errc::invalid_tree, "unresolved skill '" + name + "'");
    std::set<std::string> refs;
    detail::collect_skill_refs(it->second, refs);
    for (const auto& r : refs) self(self, r);
    in_progress.erase(name);
    resolved.insert(name);
  };
  std::set<std::string> roots;
  detail::collect_skill_refs(tree.root, roots);
  for (const auto& r : roots) resolve(resolve, r);
  for (const auto& [name, body] : tree.skills) resolve(resolve, name);
}

namespace detail {

inline Node expand_node(const Node& node, const TreeDef& tree, const std::string& id);

inline Node expand_children(Node copy, const TreeDef& tree, const std::string& id) {
  copy.id = id;
  for (std::size_t i = 0; i < copy.children.size(); ++i)
    copy.children[i] = expand_node(copy.children[i], tree, child_id(id, i));
  return copy;
}

inline Node expand_node(const Node& node, const TreeDef& tree, const std::string& id) {
  if (node.kind != NodeKind::UseSkill) return expand_children(node, tree, id);
  auto it = tree.skills.find(node.name);
  if (it == tree.skills.end()) raise(Errc::invalid_tree, "unresolved skill '" + node.name + "'");
  // The body replaces the use site; expanded ids keep the skill name so
  // traces stay readable.
  return expand_children(it->second, tree, id + ":" + node.name);
}

}  // namespace detail

// Inline every use_skill reference, producing the executable tree. Ids are
// re-derived from expanded positions. check_tree() must pass first.
inline Node expand(const TreeDef& tree) {
  check_tree(tree);
  return detail::expand_node(tree.root, tree, "/");
}

// Helpers for building trees in code (tests, generators).
namespace build {

inline Node sequence(std::vector<Node> children) {
  Node n;
  n.kind = NodeKind::Sequence;
  n.children = std::move(children);
  return n;
}

inline Node fallback(std::vector<Node> children) {
  Node n;
  n.kind = NodeKind::Fallback;
  n.children = std::move(children);
  return n;
}

inline Node parallel(std::vector<Node> children) {
  Node n;
  n.kind = NodeKind::Parallel;
  n.children = std::move(children);
  return n;
}

inline Node decorator(DecoratorKind kind, Node child,
                      std::optional<std::uint32_t> max_repeats = std::nullopt) {
  Node n;
  n.kind = NodeKind::Decorator;
  n.decorator = kind;
  n.max_repeats = max_repeats;
  n.children.push_back(std::move(child));
  return n;
}

inline Node action(std::string name, Args args = {}) {
  Node n;
  n.kind = NodeKind::Action;
  n.name = std::move(name);
  n.args = std::move(args);
  return n;
}

inline Node condition(std::string name, fusion::FusionPolicy policy) {
  Node n;
  n.kind = NodeKind::Condition;
  n.name = std::move(name);
  n.policy = std::move(policy);
  return n;
}

inline Node use_skill(std::string name) {
  Node n;
  n.kind = NodeKind::UseSkill;
  n.name = std::move(name);
  return n;
}

inline TreeDef tree(std::string name, Node root, std::map<std::string, Node> skills = {}) {
  TreeDef t;
  t.name = std::move(name);
  t.root = std::move(root);
  t.skills = std::move(skills);
  reassign_ids(t);
  return t;
}

}  // namespace build
}  // namespace mmbt
