#pragma once

#include <cmath>
#include <cstdint>

namespace jump {

// Deterministic 64-bit splitmix stream. The exact update is part of the
// phantom file contract so fixtures can be regenerated identically by any
// implementation:
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// uniform() maps the top 53 bits to [0, 1). laplace() inverts the CDF.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Laplace(0, b) via inverse CDF; exact zero for b = 0.
  double laplace(double b) {
    if (b == 0.0) return 0.0;
    const double u = uniform() - 0.5;
    const double mag = std::abs(u);
    // u in [-0.5, 0.5); log1p argument stays in (-1, 0]
    const double x = -b * std::log1p(-2.0 * mag);
    return u < 0.0 ? -x : x;
  }

private:
  std::uint64_t state_;
};

}  // namespace jump
