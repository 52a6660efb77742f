#pragma once

// Seeded randomness with a bit-stable mapping to doubles. The standard
// distributions are implementation-defined, so they are avoided here.

#include <complex>
#include <cstdint>
#include <random>

namespace poisson_currents {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

  /// Real and imaginary parts uniform on [-1, 1).
  std::complex<double> complex_unit_box() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace poisson_currents
