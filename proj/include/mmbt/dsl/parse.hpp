#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmbt/core/tree.hpp"
#include "mmbt/dsl/diagnostics.hpp"

namespace mmbt::dsl {

// Result of parse(): either a tree (no Error diagnostics) or at least one
// Error with a span. Warnings may accompany a successful parse.
struct ParseResult {
  std::optional<TreeDef> tree;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return tree.has_value(); }
};

namespace detail {

struct Line {
  int number = 0;       // 1-based
  int level = 0;        // indentation / 2
  int content_col = 1;  // 1-based column of first token
  std::string text;     // content without indentation
  std::vector<int> children;  // indices into the line table
};

struct Token {
  std::string text;
  int column = 1;  // 1-based
};

inline bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool is_valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (s[0] >= '0' && s[0] <= '9') return false;
  for (char c : s)
    if (!is_name_char(c)) return false;
  return true;
}

// Split a content line into space-separated tokens; spaces inside [...]
// do not split so lists may be written with spaces after commas.
inline std::vector<Token> tokenize(const std::string& text, int base_col) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ' ') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    int depth = 0;
    while (i < text.size() && (text[i] != ' ' || depth > 0)) {
      if (text[i] == '[') ++depth;
      if (text[i] == ']' && depth > 0) --depth;
      ++i;
    }
    out.push_back({text.substr(start, i - start), base_col + static_cast<int>(start)});
  }
  return out;
}

inline bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + s.size() && std::isfinite(out);
}

inline std::vector<std::string> split_list(const std::string& s) {
  // s includes the surrounding brackets.
  std::vector<std::string> items;
  std::string body = s.substr(1, s.size() - 2);
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string::npos) comma = body.size();
    std::string item = body.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    items.push_back(item);
    pos = comma + 1;
  }
  if (!items.empty() && items.back().empty() && body.empty()) items.pop_back();
  return items;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  ParseResult run() {
    split_lines();
    build_line_tree();
    interpret_top_level();
    finish();

    ParseResult result;
    result.diagnostics = std::move(diags_);
    if (!has_errors(result.diagnostics)) {
      reassign_ids(tree_);
      result.tree = std::move(tree_);
    }
    return result;
  }

 private:
  void error(DiagCode code, int line, int col, std::string msg) {
    diags_.push_back({Severity::Error, code, std::move(msg), {line, col}});
  }

  void split_lines() {
    std::string current;
    int number = 1;
    auto flush = [&]() {
      take_line(current, number);
      current.clear();
      ++number;
    };
    for (char c : text_) {
      if (c == '\n') {
        flush();
      } else {
        current.push_back(c);
      }
    }
    if (!current.empty()) flush();
  }

  void take_line(std::string raw, int number) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();  // CRLF input
    std::size_t indent = 0;
    while (indent < raw.size() && (raw[indent] == ' ' || raw[indent] == '\t')) {
      if (raw[indent] == '\t') {
        error(DiagCode::Indent, number, static_cast<int>(indent) + 1, "tab in indentation");
        return;
      }
      ++indent;
    }
    if (indent == raw.size()) return;  // blank line
    if (raw[indent] == '#') return;    // comment line
    if (indent % 2 != 0) {
      error(DiagCode::Indent, number, static_cast<int>(indent) + 1,
            "indentation must be two spaces per level");
      return;
    }
    Line line;
    line.number = number;
    line.level = static_cast<int>(indent / 2);
    line.content_col = static_cast<int>(indent) + 1;
    line.text = raw.substr(indent);
    lines_.push_back(std::move(line));
  }

  // Attach each line to the nearest shallower line above it; a jump of
  // more than one level is an indentation error (the line is attached at
  // the deepest open level so parsing can continue).
  void build_line_tree() {
    constexpr int kMaxDepth = 200;
    std::vector<int> stack;  // indices of open lines, stack[k] at level k
    for (int i = 0; i < static_cast<int>(lines_.size()); ++i) {
      Line& line = lines_[i];
      if (line.level > kMaxDepth) {
        error(DiagCode::Indent, line.number, line.content_col, "nesting too deep");
        continue;
      }
      const int max_level = static_cast<int>(stack.size());
      if (line.level > max_level) {
        error(DiagCode::Indent, line.number, line.content_col,
              "indentation jumps more than one level");
        line.level = max_level;
      }
      stack.resize(static_cast<std::size_t>(line.level));
      if (line.level == 0) {
        top_level_.push_back(i);
      } else {
        lines_[stack[line.level - 1]].children.push_back(i);
      }
      stack.push_back(i);
    }
  }

  void interpret_top_level() {
    if (top_level_.empty()) {
      error(DiagCode::ExpectedTree, 1, 1, "expected tree or skill");
      return;
    }
    for (int index : top_level_) {
      const Line& line = lines_[index];
      auto tokens = tokenize(line.text, line.content_col);
      const std::string& keyword = tokens[0].text;
      if (keyword == "tree" || keyword == "skill") {
        interpret_definition(line, tokens, keyword == "tree");
      } else {
        error(DiagCode::ExpectedTree, line.number, tokens[0].column,
              "expected tree or skill, got '" + keyword + "'");
      }
    }
    if (!saw_tree_ && !has_errors(diags_)) {
      error(DiagCode::ExpectedTree, 1, 1, "file defines no tree");
    }
  }

  void interpret_definition(const Line& line, const std::vector<Token>& tokens, bool is_tree) {
    if (tokens.size() != 2 || !is_valid_name(tokens[1].text)) {
      error(DiagCode::Syntax, line.number, tokens[0].column,
            std::string(is_tree ? "tree" : "skill") + " takes exactly one name");
      return;
    }
    const std::string& name = tokens[1].text;
    if (line.children.size() != 1) {
      error(DiagCode::Arity, line.number, tokens[0].column,
            std::string(is_tree ? "tree" : "skill") + " '" + name +
                "' needs exactly one root node");
      return;
    }
    auto node = interpret_node(line.children[0]);
    if (!node) return;
    if (is_tree) {
      if (saw_tree_) {
        error(DiagCode::MultipleTrees, line.number, tokens[0].column,
              "a file defines exactly one tree; '" + name + "' is the second");
        return;
      }
      saw_tree_ = true;
      tree_.name = name;
      tree_.root = std::move(*node);
    } else {
      if (tree_.skills.count(name)) {
        error(DiagCode::DuplicateName, line.number, tokens[1].column,
              "skill '" + name + "' is defined twice");
        return;
      }
      tree_.skills.emplace(name, std::move(*node));
    }
  }

  std::optional<Node> interpret_node(int index) {
    const Line& line = lines_[index];
    auto tokens = tokenize(line.text, line.content_col);
    const std::string& keyword = tokens[0].text;

    Node node;
    node.pos = {line.number, tokens[0].column};

    if (keyword == "sequence" || keyword == "fallback" || keyword == "parallel") {
      if (tokens.size() != 1) {
        error(DiagCode::Syntax, line.number, tokens[1].column,
              keyword + " takes no arguments");
        return std::nullopt;
      }
      node.kind = keyword == "sequence"  ? NodeKind::Sequence
                  : keyword == "fallback" ? NodeKind::Fallback
                                          : NodeKind::Parallel;
      return with_children(std::move(node), line, /*min=*/1, /*max=*/-1, keyword);
    }
    if (keyword == "inverter" || keyword == "force_success" || keyword == "repeat_until_success") {
      node.kind = NodeKind::Decorator;
      node.decorator = keyword == "inverter"        ? DecoratorKind::Inverter
                       : keyword == "force_success" ? DecoratorKind::ForceSuccess
                                                    : DecoratorKind::RepeatUntilSuccess;
      if (node.decorator == DecoratorKind::RepeatUntilSuccess) {
        for (std::size_t i = 1; i < tokens.size(); ++i) {
          double value = 0.0;
          if (tokens[i].text.rfind("max=", 0) == 0 && parse_number(tokens[i].text.substr(4), value) &&
              value >= 1.0 && value == std::floor(value)) {
            node.max_repeats = static_cast<std::uint32_t>(value);
          } else {
            error(DiagCode::Syntax, line.number, tokens[i].column,
                  "repeat_until_success accepts only max=INT");
            return std::nullopt;
          }
        }
      } else if (tokens.size() != 1) {
        error(DiagCode::Syntax, line.number, tokens[1].column, keyword + " takes no arguments");
        return std::nullopt;
      }
      return with_children(std::move(node), line, /*min=*/1, /*max=*/1, keyword);
    }
    if (keyword == "action") return interpret_action(line, tokens);
    if (keyword == "condition") return interpret_condition(line, tokens);
    if (keyword == "use_skill") {
      if (tokens.size() != 2 || !is_valid_name(tokens[1].text)) {
        error(DiagCode::Syntax, line.number, tokens[0].column, "use_skill takes exactly one name");
        return std::nullopt;
      }
      node.kind = NodeKind::UseSkill;
      node.name = tokens[1].text;
      return require_leaf(std::move(node), line, "use_skill");
    }
    if (keyword == "tree" || keyword == "skill") {
      error(DiagCode::Syntax, line.number, tokens[0].column,
            keyword + " definitions must start at the left margin");
      return std::nullopt;
    }
    error(DiagCode::UnknownKeyword, line.number, tokens[0].column,
          "unknown keyword '" + keyword + "'");
    return std::nullopt;
  }

  std::optional<Node> with_children(Node node, const Line& line, int min, int max,
                                    const std::string& keyword) {
    bool bad_child = false;
    for (int child : line.children) {
      auto parsed = interpret_node(child);
      if (parsed) {
        node.children.push_back(std::move(*parsed));
      } else {
        bad_child = true;
      }
    }
    if (static_cast<int>(line.children.size()) < min ||
        (max >= 0 && static_cast<int>(line.children.size()) > max)) {
      error(DiagCode::Arity, line.number, node.pos.column,
            keyword + (max == 1 ? " needs exactly one child" : " needs at least one child"));
      return std::nullopt;
    }
    if (bad_child) return std::nullopt;
    return node;
  }

  std::optional<Node> require_leaf(Node node, const Line& line, const std::string& keyword) {
    if (!line.children.empty()) {
      error(DiagCode::Arity, line.number, node.pos.column, keyword + " takes no children");
      return std::nullopt;
    }
    return node;
  }

  std::optional<Node> interpret_action(const Line& line, const std::vector<Token>& tokens) {
    if (tokens.size() < 2 || !is_valid_name(tokens[1].text)) {
      error(DiagCode::Syntax, line.number, tokens[0].column, "action takes a name");
      return std::nullopt;
    }
    Node node;
    node.pos = {line.number, tokens[0].column};
    node.kind = NodeKind::Action;
    node.name = tokens[1].text;
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      const std::string& t = tokens[i].text;
      std::size_t eq = t.find('=');
      if (eq == std::string::npos || eq == 0 || !is_valid_name(t.substr(0, eq))) {
        error(DiagCode::Syntax, line.number, tokens[i].column,
              "action arguments are key=value pairs");
        return std::nullopt;
      }
      std::string key = t.substr(0, eq);
      std::string raw = t.substr(eq + 1);
      double number = 0.0;
      if (parse_number(raw, number)) {
        node.args[key] = number;
      } else if (is_valid_name(raw)) {
        node.args[key] = raw;
      } else {
        error(DiagCode::Syntax, line.number, tokens[i].column,
              "argument value must be a number or a name");
        return std::nullopt;
      }
    }
    return require_leaf(std::move(node), line, "action");
  }

  std::optional<Node> interpret_condition(const Line& line, const std::vector<Token>& tokens) {
    if (tokens.size() < 2 || !is_valid_name(tokens[1].text)) {
      error(DiagCode::Syntax, line.number, tokens[0].column, "condition takes a name");
      return std::nullopt;
    }
    Node node;
    node.pos = {line.number, tokens[0].column};
    node.kind = NodeKind::Condition;
    node.name = tokens[1].text;

    bool have_modalities = false;
    bool have_weights = false;
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      const std::string& t = tokens[i].text;
      const int col = tokens[i].column;
      if (t.rfind("modalities=[", 0) == 0 && t.back() == ']') {
        have_modalities = true;
        for (const std::string& item : split_list(t.substr(11))) {
          if (!is_valid_name(item)) {
            error(DiagCode::Syntax, line.number, col, "bad modality name in list");
            return std::nullopt;
          }
          node.policy.modalities.push_back(item);
        }
      } else if (t.rfind("weights=[", 0) == 0 && t.back() == ']') {
        have_weights = true;
        for (const std::string& item : split_list(t.substr(8))) {
          double w = 0.0;
          if (!parse_number(item, w)) {
            error(DiagCode::Syntax, line.number, col, "weights must be numbers");
            return std::nullopt;
          }
          node.policy.weights.push_back(w);
        }
      } else if (t.rfind("lambda=", 0) == 0) {
        double l = 0.0;
        if (!parse_number(t.substr(7), l) || l < 0.0 || l > 1.0) {
          error(DiagCode::Weights, line.number, col, "lambda must be a number in [0, 1]");
          return std::nullopt;
        }
        node.policy.threshold = l;
      } else {
        error(DiagCode::Syntax, line.number, col,
              "condition takes modalities=[...] weights=[...] lambda=NUM");
        return std::nullopt;
      }
    }
    if (!have_modalities || !have_weights) {
      error(DiagCode::Syntax, line.number, tokens[0].column,
            "condition requires modalities=[...] and weights=[...]");
      return std::nullopt;
    }
    if (!check_condition_policy(node, line)) return std::nullopt;
    return require_leaf(std::move(node), line, "condition");
  }

  bool check_condition_policy(const Node& node, const Line& line) {
    const auto& p = node.policy;
    if (p.modalities.empty()) {
      error(DiagCode::Weights, line.number, node.pos.column, "condition needs at least one modality");
      return false;
    }
    if (p.modalities.size() != p.weights.size()) {
      error(DiagCode::Weights, line.number, node.pos.column,
            "modalities and weights differ in length");
      return false;
    }
    std::set<std::string> unique(p.modalities.begin(), p.modalities.end());
    if (unique.size() != p.modalities.size()) {
      error(DiagCode::Weights, line.number, node.pos.column, "duplicate modality");
      return false;
    }
    double sum = 0.0;
    for (double w : p.weights) {
      if (w < 0.0) {
        error(DiagCode::Weights, line.number, node.pos.column, "weights must be non-negative");
        return false;
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > fusion::kWeightSumTolerance) {
      error(DiagCode::Weights, line.number, node.pos.column, "weights must sum to 1");
      return false;
    }
    return true;
  }

  // Skill resolution: every reference exists, resolution acyclic.
  void finish() {
    if (has_errors(diags_)) return;
    std::set<std::string> resolved;
    std::set<std::string> in_progress;
    bool cycle_reported = false;

    auto resolve = [&](auto&& self, const std::string& name, const SourcePos& at) -> void {
      if (resolved.count(name)) return;
      auto it = tree_.skills.find(name);
      if (it == tree_.skills.end()) {
        error(DiagCode::UnresolvedSkill, at.line, at.column, "unresolved skill '" + name + "'");
        return;
      }
      if (!in_progress.insert(name).second) {
        if (!cycle_reported) {
          error(DiagCode::SkillCycle, at.line, at.column, "skill cycle through '" + name + "'");
          cycle_reported = true;
        }
        return;
      }
      walk_refs(it->second, self);
      in_progress.erase(name);
      resolved.insert(name);
    };
    walk_refs(tree_.root, resolve);
    for (auto& [name, body] : tree_.skills) resolve(resolve, name, body.pos);
  }

  template <typename F>
  void walk_refs(const Node& node, F&& resolve) {
    if (node.kind == NodeKind::UseSkill) resolve(resolve, node.name, node.pos);
    for (const Node& c : node.children) walk_refs(c, resolve);
  }

  const std::string& text_;
  std::vector<Line> lines_;
  std::vector<int> top_level_;
  std::vector<ParseDiagnostic> diags_;
  TreeDef tree_;
  bool saw_tree_ = false;
};

}  // namespace detail

// Total parser: every input yields either a TreeDef or at least one Error
// diagnostic with a source span. Grammar: indentation-structured, one node
// per line, two spaces per level; '#' lines are comments.
inline ParseResult parse(const std::string& text) { return detail::Parser(text).run(); }

}  // namespace mmbt::dsl
