#include "gapforge/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gapforge {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // Two rounds of splitmix64 over (master, index).
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

double standard_normal(Rng& rng) {
  // Marsaglia polar method; the second variate is discarded so the call is
  // stateless.
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double sample_exponential(double rate, Rng& rng) {
  return -std::log(uniform_open(rng)) / rate;
}

double sample_gamma(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw std::invalid_argument("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    const double g = sample_gamma(shape + 1.0, rng);
    return g * std::exp(std::log(uniform_open(rng)) / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_beta(double a, double b, Rng& rng) {
  const double x = sample_gamma(a, rng);
  const double y = sample_gamma(b, rng);
  return x / (x + y);
}

}  // namespace gapforge
