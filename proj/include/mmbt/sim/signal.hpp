#pragma once

#include <cmath>
#include <cstddef>

#include "mmbt/core/timeseries.hpp"
#include "mmbt/errors.hpp"
#include "mmbt/rng.hpp"

namespace mmbt::sim {

// Subtract the per-channel mean.
inline TimeSeries zero_center(const TimeSeries& in) {
  TimeSeries out = in;
  const std::size_t frames = in.frames();
  if (frames == 0) return out;
  for (std::size_t c = 0; c < in.channels; ++c) {
    double mean = 0.0;
    for (std::size_t f = 0; f < frames; ++f) mean += in.at(f, c);
    mean /= static_cast<double>(frames);
    for (std::size_t f = 0; f < frames; ++f) out.at(f, c) = in.at(f, c) - mean;
  }
  return out;
}

// Centered moving average with a shrinking window at the boundaries;
// output length equals input length. window = 1 is the identity.
inline TimeSeries moving_average(const TimeSeries& in, std::size_t window) {
  const std::size_t frames = in.frames();
  if (window < 1 || window > frames) raise(Errc::bad_window, "window must be in [1, length]");
  TimeSeries out = in;
  const std::size_t left = (window - 1) / 2;
  const std::size_t right = window / 2;
  for (std::size_t c = 0; c < in.channels; ++c) {
    for (std::size_t f = 0; f < frames; ++f) {
      const std::size_t lo = f >= left ? f - left : 0;
      const std::size_t hi = f + right < frames ? f + right : frames - 1;
      double sum = 0.0;
      for (std::size_t k = lo; k <= hi; ++k) sum += in.at(k, c);
      out.at(f, c) = sum / static_cast<double>(hi - lo + 1);
    }
  }
  return out;
}

// Zero-centre then smooth, the standard conditioning for drifting, noisy
// force/torque streams.
inline TimeSeries preprocess_ft(const TimeSeries& in, std::size_t window) {
  return moving_average(zero_center(in), window);
}

struct SynthParams {
  double drift_per_s = 0.02;     // slow sensor drift, scaled per channel
  double noise_sigma = 0.05;     // white noise
  double contact_amplitude = 1.5;  // bump injected when the world is in contact
};

// Synthetic 6-axis F/T stream: drift + white noise, plus a contact bump
// centred in the window when `in_contact`. Populates blackboard and trace
// artifacts only; no classification decision ever reads it.
inline TimeSeries synth_ft_trace(double duration_s, double rate_hz, bool in_contact, Rng& rng,
                                 const SynthParams& params = {}) {
  TimeSeries out;
  out.channels = 6;
  out.sample_period_s = 1.0 / rate_hz;
  const std::size_t frames = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  out.data.resize(frames * out.channels);
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f) * out.sample_period_s;
    for (std::size_t c = 0; c < out.channels; ++c) {
      double v = params.drift_per_s * t * (1.0 + 0.1 * static_cast<double>(c));
      v += params.noise_sigma * rng.gaussian();
      if (in_contact) {
        const double mid = duration_s / 2.0;
        const double w = duration_s / 8.0;
        const double d = (t - mid) / w;
        v += params.contact_amplitude * std::exp(-0.5 * d * d);
      }
      out.at(f, c) = v;
    }
  }
  return out;
}

// Single-channel stand-in for tactile flow magnitude, same noise model.
inline TimeSeries synth_tactile_trace(double duration_s, double rate_hz, bool in_contact, Rng& rng,
                                      const SynthParams& params = {}) {
  TimeSeries out;
  out.channels = 1;
  out.sample_period_s = 1.0 / rate_hz;
  const std::size_t frames = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  out.data.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f) * out.sample_period_s;
    double v = params.noise_sigma * rng.gaussian();
    if (in_contact) {
      const double mid = duration_s / 2.0;
      const double w = duration_s / 8.0;
      const double d = (t - mid) / w;
      v += params.contact_amplitude * std::exp(-0.5 * d * d);
    }
    out.data[f] = std::abs(v);
  }
  return out;
}

}  // namespace mmbt::sim
