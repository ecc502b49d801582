#pragma once

#include <cstdint>
#include <random>

namespace cccnet {

// Deterministic RNG used throughout the simulator. All distributions are
// inverse-transform (or Box-Muller) on top of mt19937_64, so a seed pins the
// exact draw sequence independent of standard-library internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n). n must be > 0.
  uint64_t below(uint64_t n);

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo) + 1));
  }

  bool coin() { return (next() >> 63) != 0; }

  double exponential(double mean);
  // Weibull with the given shape, scaled so the mean equals `mean`.
  double weibull(double shape, double mean);
  // Lognormal with the given sigma, location chosen so the mean equals `mean`.
  double lognormal(double sigma, double mean);
  uint64_t poisson(double rate);

 private:
  double normal01();

  std::mt19937_64 eng_;
};

}  // namespace cccnet
