#pragma once

/**
 * @file measures.hpp
 * @brief The conditioned product-Gamma law on the constant-energy simplex:
 * exact sampling (scaled symmetric Dirichlet) and exact moments.
 */

#include <span>
#include <vector>

#include "gapforge/rng.hpp"

namespace gapforge {

// Shape parameter of the single-site Gamma law (scale fixed to one).
class GammaShape {
 public:
  explicit GammaShape(double gamma);
  double value() const { return gamma_; }
  bool operator==(const GammaShape&) const = default;

 private:
  double gamma_;
};

// Product-Gamma law conditioned on mean energy E over N sites.
struct SimplexLaw {
  SimplexLaw(GammaShape gamma, double mean_energy, int sites);

  GammaShape gamma;
  double mean_energy;
  int sites;

  double total_energy() const { return mean_energy * sites; }
};

struct EnergyConfiguration {
  std::vector<double> x;
  double mean_energy = 0.0;

  // Throws ConfigError unless every x_i > 0 and sum x = N E within 1e-12
  // relative.
  void validate() const;
  double total() const;
};

// Nonnegative exponent vector for monomial moment queries.
struct MultiIndex {
  std::vector<int> exponents;
  int degree() const;
};

// x = N E w with w a normalized vector of independent Gamma(gamma, 1) draws.
EnergyConfiguration sample_configuration(const SimplexLaw& law, Rng& rng);

// E[prod w_i^{k_i}] for w ~ Dirichlet(gamma, ..., gamma) on N coordinates.
double dirichlet_moment(GammaShape gamma, int N, const MultiIndex& k);

/**
 * E[prod w_i^{e_i}] for w ~ Dirichlet(shapes) with real exponents, e_i >
 * -shape_i. Used with merged coordinates: for the symmetric law the pair
 * sum x_i + x_j is a single coordinate with shape 2 gamma.
 */
long double dirichlet_moment_general(std::span<const long double> shapes,
                                     std::span<const long double> exponents);

// E[a^p (1-a)^q] for a ~ Beta(gamma, gamma): B(gamma+p, gamma+q) / B(gamma, gamma).
double pair_alpha_moment(GammaShape gamma, int p, int q);

// E[w_1^p] where w_1 ~ Beta(gamma, (N-1) gamma) is a single normalized site.
double marginal_moment(GammaShape gamma, int N, int p);

}  // namespace gapforge
