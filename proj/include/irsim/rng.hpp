#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "irsim/types.hpp"

namespace irsim {

// Deterministic random stream. All draws are derived from raw mt19937_64
// output so that results are bit-identical across standard libraries
// (std::normal_distribution is implementation-defined, so we roll our own
// Box-Muller here).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream keyed by (seed, streamId); used to give every Monte
  // Carlo drop its own reproducible stream.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(mix(seed, stream_id));
  }

  // Uniform on [0, 1) with 53 bits of mantissa.
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller, one fresh pair per call pair.
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly-symmetric complex Gaussian with E|x|^2 = 1.
  Complex cnormal() {
    const double s = std::sqrt(0.5);
    return Complex(s * normal(), s * normal());
  }

  ComplexVector cnormal_vector(Eigen::Index n) {
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal();
    return v;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 over the concatenated words.
    std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace irsim
