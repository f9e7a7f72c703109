#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace geopg {

/* Seeded generator for the synthetic instances.  Normal variates come from
 * Box-Muller on top of mt19937_64 rather than std::normal_distribution, so a
 * given seed yields the same stream on every platform. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on (0,1]
  double uniform01() {
    return (double)((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // uniform integer in [0, k), unbiased by rejection
  std::uint64_t uniform_below(std::uint64_t k) {
    const std::uint64_t span = UINT64_C(1) << 53;
    const std::uint64_t bound = span - span % k;
    for (;;) {
      std::uint64_t v = gen_() >> 11;
      if (v < bound) return v % k;
    }
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace geopg
