#include "cccnet/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cccnet {

uint64_t Rng::below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be > 0");
  if ((n & (n - 1)) == 0) return next() & (n - 1);
  // Rejection sampling over the largest multiple of n.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

double Rng::exponential(double mean) {
  if (mean <= 0) throw std::invalid_argument("exponential: mean must be > 0");
  return -mean * std::log1p(-uniform());
}

double Rng::weibull(double shape, double mean) {
  if (mean <= 0 || shape <= 0)
    throw std::invalid_argument("weibull: mean and shape must be > 0");
  const double scale = mean / std::tgamma(1.0 + 1.0 / shape);
  return scale * std::pow(-std::log1p(-uniform()), 1.0 / shape);
}

double Rng::normal01() {
  // Box-Muller, one value per pair of uniforms.
  double u1 = uniform();
  while (u1 <= 0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::lognormal(double sigma, double mean) {
  if (mean <= 0 || sigma <= 0)
    throw std::invalid_argument("lognormal: mean and sigma must be > 0");
  const double mu = std::log(mean) - 0.5 * sigma * sigma;
  return std::exp(mu + sigma * normal01());
}

uint64_t Rng::poisson(double rate) {
  if (rate < 0) throw std::invalid_argument("poisson: rate must be >= 0");
  // Knuth's product method; rates here are small (per-cycle arrival counts).
  const double limit = std::exp(-rate);
  uint64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform();
  } while (p > limit);
  return k - 1;
}

}  // namespace cccnet
