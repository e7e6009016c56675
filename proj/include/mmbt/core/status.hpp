#pragma once

namespace mmbt {

// Tick result of any node. Condition nodes are restricted to
// Success/Failure; the engine enforces that.
enum class NodeStatus { Running, Success, Failure };

inline const char* to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::Running: return "running";
    case NodeStatus::Success: return "success";
    case NodeStatus::Failure: return "failure";
  }
  return "?";
}

}  // namespace mmbt
