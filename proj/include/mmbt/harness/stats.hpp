#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mmbt/errors.hpp"

namespace mmbt::harness {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion; well-behaved at extreme
// rates and small n, unlike the normal approximation.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.959963984540054) {
  if (n == 0) raise(Errc::empty_input, "wilson interval of zero trials");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = (z / denom) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  Interval out{center - half, center + half};
  if (out.lo < 0.0) out.lo = 0.0;
  if (out.hi > 1.0) out.hi = 1.0;
  return out;
}

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) raise(Errc::empty_input, "mean of nothing");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Sample standard deviation; zero for a single observation.
inline double stddev(const std::vector<double>& xs) {
  if (xs.empty()) raise(Errc::empty_input, "stddev of nothing");
  if (xs.size() == 1) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace mmbt::harness
