#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lcbal {

// Seeded random stream. mt19937_64 output is fully specified by the
// standard; the mappings below avoid std::uniform_*_distribution, whose
// results differ between standard libraries, so a seed produces the same
// stream everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform double in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform integer in {0, ..., bound-1}; bound must be positive
  std::uint64_t uniform_int(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(gen_()) * bound) >> 64);
  }

  // standard normal via Box-Muller
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 gen_;
};

}  // namespace lcbal
