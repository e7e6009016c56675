#pragma once

#include <string>
#include <vector>

namespace mmbt::dsl {

struct SourceSpan {
  int line = 1;    // 1-based
  int column = 1;  // 1-based
};

enum class Severity { Error, Warning };

// Stable codes so tools and tests can branch without parsing messages.
enum class DiagCode {
  Indent,
  UnknownKeyword,
  Arity,
  Weights,
  UnresolvedSkill,
  SkillCycle,
  DuplicateName,
  ExpectedTree,
  MultipleTrees,
  Syntax,
  GuardlessRepeat,
  UnreachableChild,
  UnknownModality,
};

inline const char* to_string(DiagCode c) {
  switch (c) {
    case DiagCode::Indent: return "indent";
    case DiagCode::UnknownKeyword: return "unknown-keyword";
    case DiagCode::Arity: return "arity";
    case DiagCode::Weights: return "weights";
    case DiagCode::UnresolvedSkill: return "unresolved-skill";
    case DiagCode::SkillCycle: return "skill-cycle";
    case DiagCode::DuplicateName: return "duplicate-name";
    case DiagCode::ExpectedTree: return "expected-tree";
    case DiagCode::MultipleTrees: return "multiple-trees";
    case DiagCode::Syntax: return "syntax";
    case DiagCode::GuardlessRepeat: return "guardless-repeat";
    case DiagCode::UnreachableChild: return "unreachable-child";
    case DiagCode::UnknownModality: return "unknown-modality";
  }
  return "?";
}

struct ParseDiagnostic {
  Severity severity = Severity::Error;
  DiagCode code = DiagCode::Syntax;
  std::string message;
  SourceSpan span;
};

inline bool has_errors(const std::vector<ParseDiagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

}  // namespace mmbt::dsl
