#include "gapforge/special.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gapforge {

long double log_gamma(long double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return lgammal_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

long double log_beta(long double a, long double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta_pdf(double x, double a, double b) {
  if (x < 0.0 || x > 1.0) return 0.0;
  if ((x == 0.0 && a < 1.0) || (x == 1.0 && b < 1.0)) return HUGE_VAL;
  if (x == 0.0) return a == 1.0 ? std::exp(-static_cast<double>(log_beta(a, b))) : 0.0;
  if (x == 1.0) return b == 1.0 ? std::exp(-static_cast<double>(log_beta(a, b))) : 0.0;
  const long double lx = std::log(static_cast<long double>(x));
  const long double l1x = std::log1p(-static_cast<long double>(x));
  return static_cast<double>(std::exp((a - 1) * lx + (b - 1) * l1x - log_beta(a, b)));
}

double beta_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

namespace {

struct AgmResult {
  long double k;        // K(t)
  long double e_ratio;  // E(t) / K(t)
};

AgmResult agm(double t) {
  const long double tl = t;
  long double a = 1.0L;
  long double b = std::sqrt((1.0L - tl) * (1.0L + tl));
  long double sum = tl * tl / 2;
  long double pow2 = 0.5L;
  for (int it = 0; it < 64; ++it) {
    const long double c = (a - b) / 2;
    if (std::abs(c) <= 1e-20L * a) break;
    const long double an = (a + b) / 2;
    const long double bn = std::sqrt(a * b);
    pow2 *= 2;
    sum += pow2 * c * c;
    a = an;
    b = bn;
  }
  return {std::numbers::pi_v<long double> / (2 * a), 1.0L - sum};
}

}  // namespace

double elliptic_k(double t) {
  if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("elliptic_k: modulus must lie in [0,1)");
  return static_cast<double>(agm(t).k);
}

double elliptic_e(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("elliptic_e: modulus must lie in [0,1]");
  if (t == 1.0) return 1.0;
  const AgmResult r = agm(t);
  return static_cast<double>(r.k * r.e_ratio);
}

}  // namespace gapforge
