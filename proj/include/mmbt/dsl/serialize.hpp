#pragma once

#include <cstdio>
#include <string>

#include "mmbt/core/tree.hpp"

namespace mmbt::dsl {

// Up to 12 significant digits, shortest form ("2", "0.5", "0.330827067669").
inline std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

namespace detail {

inline void serialize_node(const Node& node, int level, std::string& out) {
  out.append(static_cast<std::size_t>(level) * 2, ' ');
  switch (node.kind) {
    case NodeKind::Sequence:
    case NodeKind::Fallback:
    case NodeKind::Parallel:
      out += to_string(node.kind);
      break;
    case NodeKind::Decorator:
      out += to_string(node.decorator);
      if (node.decorator == DecoratorKind::RepeatUntilSuccess && node.max_repeats)
        out += " max=" + std::to_string(*node.max_repeats);
      break;
    case NodeKind::Action:
      out += "action " + node.name;
      for (const auto& [key, value] : node.args) {
        out += " " + key + "=";
        if (const double* num = std::get_if<double>(&value)) {
          out += format_number(*num);
        } else {
          out += std::get<std::string>(value);
        }
      }
      break;
    case NodeKind::Condition: {
      out += "condition " + node.name + " modalities=[";
      for (std::size_t i = 0; i < node.policy.modalities.size(); ++i) {
        if (i) out += ",";
        out += node.policy.modalities[i];
      }
      out += "] weights=[";
      for (std::size_t i = 0; i < node.policy.weights.size(); ++i) {
        if (i) out += ",";
        out += format_number(node.policy.weights[i]);
      }
      out += "] lambda=" + format_number(node.policy.threshold);
      break;
    }
    case NodeKind::UseSkill:
      out += "use_skill " + node.name;
      break;
  }
  out += "\n";
  for (const Node& child : node.children) serialize_node(child, level + 1, out);
}

}  // namespace detail

// Canonical text: tree first, skills in name order, two-space indent,
// args sorted by key, lambda always explicit, LF endings, trailing
// newline. Serialising twice gives identical bytes, and parsing the
// output reproduces the tree.
inline std::string serialize(const TreeDef& tree) {
  std::string out;
  out += "tree " + tree.name + "\n";
  detail::serialize_node(tree.root, 1, out);
  for (const auto& [name, body] : tree.skills) {
    out += "skill " + name + "\n";
    detail::serialize_node(body, 1, out);
  }
  return out;
}

}  // namespace mmbt::dsl
