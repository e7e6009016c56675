#pragma once

#include <cassert>

namespace mmbt {

// Simulated trial clock in seconds. Monotone within a trial; parallel
// composites rewind child start times through set(), never below zero.
class SimClock {
 public:
  double now() const { return now_; }

  void advance(double seconds) {
    assert(seconds >= 0.0);
    now_ += seconds;
  }

  void set(double seconds) {
    assert(seconds >= 0.0);
    now_ = seconds;
  }

 private:
  double now_ = 0.0;
};

}  // namespace mmbt
