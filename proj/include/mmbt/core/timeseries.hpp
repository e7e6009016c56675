#pragma once

#include <cstddef>
#include <vector>

namespace mmbt {

// Fixed-rate multichannel signal, row-major (frame-by-frame).
struct TimeSeries {
  double sample_period_s = 0.0;
  std::size_t channels = 1;
  std::vector<double> data;

  std::size_t frames() const { return channels == 0 ? 0 : data.size() / channels; }

  double& at(std::size_t frame, std::size_t channel) { return data[frame * channels + channel]; }
  double at(std::size_t frame, std::size_t channel) const { return data[frame * channels + channel]; }

  friend bool operator==(const TimeSeries& a, const TimeSeries& b) {
    return a.sample_period_s == b.sample_period_s && a.channels == b.channels && a.data == b.data;
  }
};

}  // namespace mmbt
