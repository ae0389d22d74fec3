#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace gapforge {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/**
 * Orthonormal polynomials for the Beta(a, b) probability law on [0,1],
 * built from the three-term (Jacobi matrix) recurrence.
 */
class BetaOrthonormal {
 public:
  BetaOrthonormal(double a, double b, int count);

  int count() const { return static_cast<int>(diag_.size()); }
  // Writes p_0(x), ..., p_{count-1}(x) into out.
  void evaluate(double x, std::span<double> out) const;
  // Jacobi matrix: diagonal entries and off-diagonal entries (size count-1).
  const std::vector<long double>& diagonal() const { return diag_; }
  const std::vector<long double>& off_diagonal() const { return off_; }

 private:
  std::vector<long double> diag_;
  std::vector<long double> off_;
};

// n-point Gauss rule for the Beta(a, b) probability law on [0,1]; weights
// sum to one. Nodes by Sturm bisection, weights by the Christoffel formula.
QuadratureRule gauss_jacobi_beta(double a, double b, int n);

// n-point Gauss-Legendre rule on [lo, hi].
QuadratureRule gauss_legendre(int n, double lo, double hi);

// Calls visit(x, w) for the level-`level` tanh-sinh rule on [lo, hi]
// (step 2^-level). Nodes that round onto an endpoint are skipped, so
// integrable endpoint singularities are never evaluated.
template <class Visit>
void tanh_sinh_nodes(double lo, double hi, int level, Visit&& visit) {
  constexpr double t_max = 4.5;
  const double h = std::ldexp(1.0, -level);
  const double half = 0.5 * (hi - lo);
  const int k_max = static_cast<int>(std::ceil(t_max / h));
  for (int k = -k_max; k <= k_max; ++k) {
    const double t = k * h;
    const double v = 0.5 * std::numbers::pi * std::sinh(t);
    const double e = std::exp(-2.0 * std::abs(v));
    const double dist = (hi - lo) * e / (1.0 + e);
    const double w = half * 0.5 * std::numbers::pi * std::cosh(t) * 4.0 * e /
                     ((1.0 + e) * (1.0 + e));
    const double x = (k < 0) ? lo + dist : (k > 0 ? hi - dist : lo + half);
    if (x <= lo || x >= hi || w == 0.0) continue;
    visit(x, w * h);
  }
}

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;  // change between the last two levels
  int level = 0;
};

// Tanh-sinh integration of a scalar function over consecutive pieces
// [b_0, b_1], ..., [b_{k-1}, b_k]; levels are refined until the change falls
// below tol * max(1, |value|).
template <class F>
IntegralEstimate tanh_sinh_pieces(F&& f, std::span<const double> breaks,
                                  double tol = 1e-13, int max_level = 10) {
  auto at_level = [&](int level) {
    long double sum = 0.0L;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      if (!(breaks[p + 1] > breaks[p])) continue;
      tanh_sinh_nodes(breaks[p], breaks[p + 1], level,
                      [&](double x, double w) { sum += w * f(x); });
    }
    return static_cast<double>(sum);
  };
  IntegralEstimate est;
  double prev = at_level(3);
  for (int level = 4; level <= max_level; ++level) {
    const double cur = at_level(level);
    est = {cur, std::abs(cur - prev), level};
    if (est.error <= tol * std::max(1.0, std::abs(cur))) break;
    prev = cur;
  }
  return est;
}

template <class F>
IntegralEstimate tanh_sinh(F&& f, double lo, double hi, double tol = 1e-13) {
  const double b[2] = {lo, hi};
  return tanh_sinh_pieces(std::forward<F>(f), std::span<const double>(b, 2), tol);
}

}  // namespace gapforge
