#pragma once

#include <stdexcept>
#include <string>

namespace mmbt {

enum class Errc {
  unknown_handler,
  condition_returned_running,
  blackboard_type,
  key_absent,
  tick_budget_exceeded,
  invalid_tree,
  modality_mismatch,
  empty_input,
  too_many_modalities,
  physical_order,
  no_surrogate,
  bad_window,
  config,
};

inline const char* to_string(Errc c) {
  switch (c) {
    case Errc::unknown_handler: return "unknown_handler";
    case Errc::condition_returned_running: return "condition_returned_running";
    case Errc::blackboard_type: return "blackboard_type";
    case Errc::key_absent: return "key_absent";
    case Errc::tick_budget_exceeded: return "tick_budget_exceeded";
    case Errc::invalid_tree: return "invalid_tree";
    case Errc::modality_mismatch: return "modality_mismatch";
    case Errc::empty_input: return "empty_input";
    case Errc::too_many_modalities: return "too_many_modalities";
    case Errc::physical_order: return "physical_order";
    case Errc::no_surrogate: return "no_surrogate";
    case Errc::bad_window: return "bad_window";
    case Errc::config: return "config";
  }
  return "unknown";
}

// Single exception type for the whole library; `code()` identifies the
// failure class so callers and tests can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mmbt
