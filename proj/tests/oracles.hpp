#pragma once

// Reference computations used by the tests. Nothing here calls into the
// library, so a test that compares against these is an independent check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

inline double beta_pdf(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double lb = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lb);
}

// E[B^n] for B ~ Beta(a, b), as a product of ratios.
inline double beta_raw_moment(double a, double b, int n) {
  double v = 1.0;
  for (int k = 0; k < n; ++k) v *= (a + k) / (a + b + k);
  return v;
}

// E[prod w_i^{k_i}] for w ~ Dirichlet(gamma, ..., gamma).
inline double dirichlet_moment(double gamma, const std::vector<int>& k) {
  const double N = static_cast<double>(k.size());
  int total = 0;
  double log_v = std::lgamma(N * gamma);
  for (int e : k) {
    log_v += std::lgamma(gamma + e) - std::lgamma(gamma);
    total += e;
  }
  log_v -= std::lgamma(N * gamma + total);
  return std::exp(log_v);
}

// Double-exponential quadrature on (lo, hi) at fixed step, tolerant of
// integrable endpoint singularities. Distances to the nearer endpoint are
// formed directly so nodes never round onto the endpoint.
inline double tanh_sinh(const std::function<double(double)>& f, double lo, double hi,
                        double h = 1.0 / 64.0) {
  const double half = 0.5 * (hi - lo);
  long double sum = 0.0L;
  for (int k = -static_cast<int>(4.0 / h); k <= static_cast<int>(4.0 / h); ++k) {
    const double t = k * h;
    const double u = 0.5 * std::numbers::pi * std::sinh(std::abs(t));
    const double e = std::exp(-2.0 * u);
    const double d = (hi - lo) * e / (1.0 + e);
    const double x = t < 0 ? lo + d : (t > 0 ? hi - d : lo + half);
    if (!(x > lo && x < hi)) continue;
    const double w = half * std::numbers::pi * std::cosh(t) * 2.0 * e / ((1.0 + e) * (1.0 + e));
    sum += w * f(x);
  }
  return static_cast<double>(sum) * h;
}

// Integral over (0, 1) split at the given interior points.
inline double integrate_unit(const std::function<double(double)>& f, std::vector<double> cuts,
                             double h = 1.0 / 64.0) {
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += tanh_sinh(f, cuts[i], cuts[i + 1], h);
  return s;
}

// Applies transpositions (1-based sites) to the identity labelling.
inline std::vector<int> compose_swaps(int n, const std::vector<std::pair<int, int>>& swaps) {
  std::vector<int> label(n + 1);
  for (int s = 0; s <= n; ++s) label[s] = s;
  for (auto [a, b] : swaps) std::swap(label[a], label[b]);
  return label;
}

// Seeded generator for property tests.
struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  std::vector<double> energies(int n, double lo = 0.01, double hi = 5.0) {
    std::vector<double> x(n);
    for (auto& v : x) v = uniform(lo, hi);
    return x;
  }
};

}  // namespace oracle
