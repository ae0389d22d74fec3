#pragma once

/**
 * @file special.hpp
 * @brief Gamma-function helpers, Beta density and complete elliptic integrals.
 */

namespace gapforge {

// Thread-safe log|Gamma(x)| (the C library version writes a global sign flag).
long double log_gamma(long double x);
long double log_beta(long double a, long double b);

double beta_pdf(double x, double a, double b);

// Regularized incomplete Beta I_x(a, b), i.e. the Beta(a, b) CDF.
double beta_cdf(double x, double a, double b);

/**
 * Complete elliptic integrals in the modulus convention:
 *   K(t) = int_0^{pi/2} (1 - t^2 sin^2 th)^{-1/2} dth,
 *   E(t) = int_0^{pi/2} (1 - t^2 sin^2 th)^{1/2} dth.
 * Evaluated with the arithmetic-geometric mean. Callers using the parameter
 * convention m must pass t = sqrt(m).
 */
double elliptic_k(double t);
double elliptic_e(double t);

}  // namespace gapforge
