#include "gapforge/quadrature.hpp"

#include <stdexcept>

#include "gapforge/linalg.hpp"

namespace gapforge {

BetaOrthonormal::BetaOrthonormal(double a, double b, int count) {
  if (!(a > 0.0 && b > 0.0) || count < 1)
    throw std::invalid_argument("BetaOrthonormal: need a, b > 0 and count >= 1");
  // Jacobi parameters on [-1,1] for the weight (1-x)^al (1+x)^be, u = (1+x)/2.
  const long double al = b - 1.0L, be = a - 1.0L, s = al + be;
  diag_.resize(count);
  off_.resize(count > 1 ? count - 1 : 0);
  for (int n = 0; n < count; ++n) {
    long double an;
    if (n == 0)
      an = (be - al) / (s + 2);
    else
      an = (be * be - al * al) / ((2 * n + s) * (2 * n + s + 2));
    diag_[n] = (1 + an) / 2;
  }
  for (int n = 1; n < count; ++n) {
    long double bn;
    if (n == 1)
      bn = 4 * (1 + al) * (1 + be) / ((2 + s) * (2 + s) * (3 + s));
    else
      bn = 4.0L * n * (n + al) * (n + be) * (n + s) /
           ((2 * n + s) * (2 * n + s) * (2 * n + s + 1) * (2 * n + s - 1));
    off_[n - 1] = std::sqrt(bn) / 2;
  }
}

void BetaOrthonormal::evaluate(double x, std::span<double> out) const {
  const int n = count();
  long double prev = 0.0L, cur = 1.0L;
  out[0] = 1.0;
  for (int k = 0; k + 1 < n; ++k) {
    const long double next =
        ((x - diag_[k]) * cur - (k > 0 ? off_[k - 1] * prev : 0.0L)) / off_[k];
    prev = cur;
    cur = next;
    out[k + 1] = static_cast<double>(cur);
  }
}

QuadratureRule gauss_jacobi_beta(double a, double b, int n) {
  const BetaOrthonormal poly(a, b, n);
  const auto& d = poly.diagonal();
  const auto& e = poly.off_diagonal();
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  std::vector<long double> p(n);
  for (int k = 0; k < n; ++k) {
    const long double x = tridiagonal_eigenvalue<long double>(d, e, k, 1e-21L);
    // Christoffel weight 1 / sum p_j(x)^2 with the orthonormal recurrence in
    // extended precision.
    long double prev = 0.0L, cur = 1.0L, norm = 1.0L;
    for (int j = 0; j + 1 < n; ++j) {
      const long double next = ((x - d[j]) * cur - (j > 0 ? e[j - 1] * prev : 0.0L)) / e[j];
      prev = cur;
      cur = next;
      norm += cur * cur;
    }
    rule.nodes[k] = static_cast<double>(x);
    rule.weights[k] = static_cast<double>(1.0L / norm);
  }
  return rule;
}

QuadratureRule gauss_legendre(int n, double lo, double hi) {
  QuadratureRule rule = gauss_jacobi_beta(1.0, 1.0, n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = lo + (hi - lo) * rule.nodes[k];
    rule.weights[k] *= (hi - lo);
  }
  return rule;
}

}  // namespace gapforge
