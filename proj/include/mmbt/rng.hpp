#pragma once

#include <cmath>
#include <cstdint>

namespace mmbt {

// Deterministic, platform-independent random stream.
//
// std::mt19937_64 is fully specified by the standard, but the std
// distributions are not; every variate here is derived from raw engine
// output so that identical (seed, trial) pairs give byte-identical runs
// on any conforming implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : s_(state ? state : 0x9e3779b97f4a7c15ull) {}

  // Stream for Monte Carlo trial `trial` of a run seeded with `seed`.
  // Trials never share a stream, so scheduling order cannot matter.
  static Rng stream(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t x = splitmix(seed ^ (trial * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull));
    return Rng(splitmix(x));
  }

  std::uint64_t next_u64() {
    // xorshift* over a splitmix-initialised state; small, fast, and
    // entirely defined by this header.
    std::uint64_t x = s_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    s_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1u;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; caches the second variate.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t s_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mmbt
