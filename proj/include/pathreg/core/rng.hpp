#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pathreg::core {

/// Deterministic derived seed for batch element i. All batch operations
/// partition the seed space this way, so serial and parallel runs agree.
inline std::uint64_t split_seed(std::uint64_t base_seed, std::uint64_t index) {
  return base_seed + index;
}

/// Standard normal stream with a fully pinned algorithm (mt19937_64 +
/// Box-Muller), so identical seeds give bit-identical draws on a given
/// platform.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1], u2 in [0,1)
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace pathreg::core
