#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "mmbt/core/timeseries.hpp"
#include "mmbt/errors.hpp"

namespace mmbt {

// Closed set of value types so traces and serialised dumps stay well-defined.
using BlackboardValue = std::variant<bool, std::int64_t, double, TimeSeries, std::string>;

// Shared key-value store between sensing actions and condition nodes.
// Reading an absent key is an error, never a silent default.
class Blackboard {
 public:
  void put(const std::string& key, BlackboardValue value) { values_[key] = std::move(value); }

  const BlackboardValue& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) raise(Errc::key_absent, "blackboard key '" + key + "'");
    return it->second;
  }

  template <typename T>
  const T& get_as(const std::string& key) const {
    const BlackboardValue& v = get(key);
    const T* p = std::get_if<T>(&v);
    if (!p) raise(Errc::blackboard_type, "blackboard key '" + key + "' holds a different type");
    return *p;
  }

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void clear() { values_.clear(); }
  std::size_t size() const { return values_.size(); }

 private:
  std::map<std::string, BlackboardValue> values_;
};

}  // namespace mmbt
