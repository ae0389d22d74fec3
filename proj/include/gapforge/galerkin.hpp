#pragma once

/**
 * @file galerkin.hpp
 * @brief Variational gap computation: the Rayleigh quotient D(f) / Var(f)
 * restricted to polynomials of bounded total degree on the simplex.
 *
 * Work happens on the normalized simplex w = x / (N E). For a mechanical
 * kernel Lambda = s^m Lambda_r the Dirichlet form scales by (N E)^m, and the
 * pair (x_i, x_j) = s (beta, 1 - beta) splits off with beta ~ Beta(gamma,
 * gamma) independent of (s, remaining sites). Each Dirichlet-form entry is
 * then a merged Dirichlet moment times a one-dimensional pair form
 *   Q(phi, psi) = int int q(beta, alpha) (phi(alpha) - phi(beta)) (psi(alpha) - psi(beta)).
 */

#include <string>
#include <vector>

#include "gapforge/linalg.hpp"
#include "gapforge/measures.hpp"
#include "gapforge/models.hpp"
#include "gapforge/topology.hpp"

namespace gapforge {

// Multi-indices over the first N-1 coordinates (length N, last exponent
// zero) in graded-lexicographic order; index 0 is the constant.
struct PolynomialBasis {
  int N = 0;
  int degree = 0;
  std::vector<MultiIndex> indices;

  std::size_t size() const { return indices.size(); }
  // Number of basis elements with total degree <= d.
  std::size_t count_up_to(int d) const;
};

PolynomialBasis build_basis(int N, int d);

enum class BasisFamily {
  Monomial,    // w^a
  Orthogonal,  // products of univariate Beta(gamma, (N-1) gamma) orthonormal polynomials
};

enum class Coordinates {
  Normalized,  // forms in w, gap rescaled by (N E)^m afterwards
  Raw,         // forms in x = N E w directly
};

struct AssemblyOptions {
  BasisFamily family = BasisFamily::Orthogonal;
  Coordinates coordinates = Coordinates::Normalized;
  int quadrature_level = 5;           // tanh-sinh level for non-polynomial kernels
  double quadrature_tolerance = 1e-9;  // node-doubling threshold
};

struct QuadraticForms {
  Matrix<long double> gram;       // G
  Matrix<long double> dirichlet;  // A
  // Monomial coefficients of each basis function in w: coefficients(r, c)
  // is the weight of monomial r in basis function c.
  Matrix<long double> coefficients;
  PolynomialBasis basis;
  double gap_scale = 1.0;           // multiplies the generalized eigenvalue
  double quadrature_error = 0.0;    // node-doubling change of the pair form
  std::string pair_form_method;     // "exact" or "quadrature"
};

/**
 * Assembles G and A. Pair forms are exact for the star kernel (Beta
 * moments) and the stick kernel (closed-form monomial moments of
 * |beta - alpha|^(m-1)); GG2 and GG3 use two-dimensional tanh-sinh with
 * branch splitting. Throws NumericalError if the quadrature change exceeds
 * the tolerance.
 */
QuadraticForms assemble(const ExchangeKernel& kernel, const Topology& topo, const SimplexLaw& law,
                        const PolynomialBasis& basis, const AssemblyOptions& options = {});

struct GapEstimateVar {
  double value = 0.0;
  int degree = 0;
  std::vector<double> history;  // history[d'-1] = gap on degree <= d'
  double condition = 0.0;       // of the diagonally scaled deflated Gram matrix
  double quadrature_error = 0.0;
  std::string method;
  // Slowest mode as polynomial coefficients over `monomials` in w = x / (N E).
  std::vector<MultiIndex> monomials;
  std::vector<double> mode;
};

/**
 * Smallest eigenvalue of A v = lambda G v on the mean-zero subspace.
 * Throws BasisDegeneracyError when the scaled deflated Gram matrix has
 * condition number above 1e12.
 */
GapEstimateVar solve_gap(const QuadraticForms& forms);

// Evaluates sum_r c_r prod_k w_k^{e_rk} at w = x / total.
double evaluate_mode(const GapEstimateVar& gap, const std::vector<double>& x, double total);

// Default degree: 4 for N <= 4, 3 for N <= 6, 2 beyond.
int default_degree(int N);

// Convenience wrapper: build_basis + assemble + solve_gap.
GapEstimateVar galerkin_gap(const ExchangeKernel& kernel, const Topology& topo,
                            const SimplexLaw& law, int degree, const AssemblyOptions& options = {});

struct KappaPair {
  double kappa = 0.0;        // nearest-neighbour three-site gap at total energy 1
  double kappa_tilde = 0.0;  // long-range three-site gap at total energy 1
};

KappaPair kappa(double m, GammaShape gamma, int d);

struct TwoSiteConstant {
  double value = 0.0;
  double half_resolution_value = 0.0;  // same computation at M / 2
  int resolution = 0;
  double plateau() const;              // |value - half_resolution_value|
};

/**
 * Smallest nonconstant eigenvalue of the pair operator
 *   (H f)(beta) = Lambda_r(beta) f(beta) - w(beta)^{-1} int q(beta, alpha) f(alpha) d alpha
 * on L^2(Beta(gamma, gamma)), discretized by product-integration Nystrom on
 * M Gauss-Jacobi nodes. Equals lambda(E, 2) / Lambda_s(2E).
 */
TwoSiteConstant two_site_constant(const ExchangeKernel& kernel, int M = 64);

// Pair-form matrix Q over pair functions phi_{u,v}(t) = t^u (1-t)^v with
// u + v <= d, indexed by pair_index(u, v). Exposed for tests.
struct PairForms {
  int degree = 0;
  Matrix<long double> q;
  double error = 0.0;
  std::string method;
  static int index(int u, int v);
};

PairForms pair_forms(const ExchangeKernel& kernel, int d, const AssemblyOptions& options = {});

}  // namespace gapforge
