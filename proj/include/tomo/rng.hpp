#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "tomo/errors.hpp"

namespace tomo {

// Seeded generator with a fully reproducible output sequence: mt19937_64 is
// pinned by the standard, and all distributions below are derived from its
// raw output by fixed arithmetic (std::*_distribution is implementation
// defined and must not be used here).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double gaussian() {
    constexpr double two_pi = 6.283185307179586476925286766559;
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // Shift into (0,1] so the log is finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = two_pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Exact binomial draw: counts `trials` Bernoulli(p) successes.
  std::int64_t binomial(std::int64_t trials, double p) {
    if (trials < 0) throw OutOfRange("binomial: trials must be non-negative");
    if (p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < trials; ++i) {
      if (uniform() < p) ++count;
    }
    return count;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tomo
