#pragma once

#include <cstdint>
#include <random>

namespace gapforge {

using Rng = std::mt19937_64;

// Seed for the stream owned by task `index` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_seed(master, index));
}

// Uniform on [0,1) with 53 random bits. Portable across standard libraries,
// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0,1).
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 12) + 0.5) * 0x1.0p-52;
}

double standard_normal(Rng& rng);
double sample_exponential(double rate, Rng& rng);

// Gamma(shape, 1). Marsaglia-Tsang squeeze; shapes below one are boosted
// through Gamma(shape + 1) * U^(1/shape), which is exact.
double sample_gamma(double shape, Rng& rng);

double sample_beta(double a, double b, Rng& rng);

}  // namespace gapforge
