#pragma once

/**
 * @file appendix.hpp
 * @brief Jacobi-polynomial reduction of the three-site long-range constant
 * at m = 1, the constants nu_n, p_n, q_n, certificate sequences and the
 * lemma suite built on them.
 *
 * Here mu = Beta(gamma, 2 gamma) is the one-site marginal on the sum-1
 * three-site simplex and J_n are the Jacobi polynomials orthogonal for mu,
 * normalized so that J_n(0) = Gamma(n + gamma) / (n! Gamma(gamma)).
 *
 * Two versions of q_n are provided. QForm::Printed is the published closed
 * form. QForm::Consistent is the value obtained from the definition
 *   q_n = (J_{n,n} / J_{n+1,n+1}) sqrt(E[J_{n+1}^2] / E[J_n^2]),
 * which differs from the printed one by the factor sqrt(n + 2 gamma): the
 * printed norm ratio drops a Gamma(n + 2 gamma) factor. Lemma and
 * proposition checks default to the printed form, because that is the
 * sequence those statements are about; anything claiming to bound the
 * actual quadratic forms defaults to the consistent form.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gapforge/errors.hpp"
#include "gapforge/measures.hpp"

namespace gapforge {

enum class QForm { Printed, Consistent };

const char* to_string(QForm form);

// Coefficients J_{n,0..n} of J_n in powers of u, from log-gamma products.
std::vector<long double> jacobi_coefficients(GammaShape gamma, int n);

// J_n(u). Uses the explicit coefficients for n <= 30 and the orthonormal
// three-term recurrence (rescaled to the same normalization) beyond.
double jacobi_value(GammaShape gamma, int n, double u);

struct JacobiBasis {
  GammaShape gamma{1.0};
  int max_order = 0;
  std::vector<std::vector<long double>> coefficients;  // coefficients[n][m] = J_{n,m}

  double evaluate(int n, double u) const;
};

JacobiBasis jacobi_basis(GammaShape gamma, int max_order);

// E_mu[J_n^2] by Gauss-Jacobi quadrature (exact for n < nodes).
double jacobi_norm_squared(GammaShape gamma, int n, int nodes = 64);

double nu_n(GammaShape gamma, int n);  // n >= 0, nu_0 = 1
double p_n(GammaShape gamma, int n);   // n >= 1
double q_n(GammaShape gamma, int n, QForm form = QForm::Printed);  // n >= 1, negative

struct SpectralConstants {
  GammaShape gamma{1.0};
  QForm form = QForm::Printed;
  std::vector<double> nu;  // index n, 0..n_max + 1
  std::vector<double> p;   // index n, p[0] unused
  std::vector<double> q;   // index n, q[0] unused
};

SpectralConstants spectral_constants(GammaShape gamma, int n_max, QForm form = QForm::Printed);

// Constants recomputed from the Jacobi coefficients and quadrature norms:
//   p_n = 1 + J_{n+1,n}/J_{n+1,n+1} - J_{n,n-1}/J_{n,n}
//   q_n = (J_{n,n}/J_{n+1,n+1}) sqrt(E[J_{n+1}^2]/E[J_n^2])
struct QuadratureConstants {
  double p = 0.0;
  double q = 0.0;
};

QuadratureConstants constants_by_quadrature(GammaShape gamma, int n, int nodes = 64);

/**
 * max over a grid of x_j in (0, 1) of
 *   | int J_n((1 - x_j) beta) Beta(gamma, gamma)(d beta) - nu_n J_n(x_j) |,
 * the conditional-expectation relation on the sum-1 three-site simplex.
 */
double verify_conditional_eigenrelation(GammaShape gamma, int n, int nodes = 64);

// F_n = J_n(x1) + J_n(x2) + J_n(x3), G_n = J_n(x1) - J_n(x3),
// H_n = J_n(x1) - 2 J_n(x2) + J_n(x3), evaluated at a point of the sum-1 simplex.
struct TripleValues {
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
};

TripleValues triple_basis(GammaShape gamma, int n, const std::vector<double>& x);

struct TripleBasisReport {
  double max_f1 = 0.0;                 // max |F_1| at the sampled simplex points
  double max_cross_correlation = 0.0;  // max |E[X_n Y_m]| / (|X_n| |Y_m|) across families
};

// Cross-family orthogonality under the sum-1 three-site law by exact
// product Gauss-Jacobi quadrature, plus F_1 = 0 at `points` random points.
TripleBasisReport check_triple_basis(GammaShape gamma, int n_max, int points, std::uint64_t seed);

enum class Family { A, B };

const char* to_string(Family family);

/**
 * Family A: diagonal (1 + 2 nu_k) p_k for k >= 2, off-diagonal
 * -sqrt((1 + 2 nu_k)(1 + 2 nu_{k+1})) q_k. Family B: the same with
 * (1 - nu_k) and k >= 1.
 */
struct TridiagonalForm {
  std::vector<long double> diag;
  std::vector<long double> off;
  int first_index = 0;
};

TridiagonalForm tridiagonal_form(Family family, GammaShape gamma, int n_max,
                                 QForm form = QForm::Printed);

struct TridiagonalSup {
  double truncated = 0.0;    // largest eigenvalue on indices <= n_max
  double tail_bound = 0.0;   // Gershgorin bound on the rows beyond n_max
  double coupling = 0.0;     // the single entry joining the two blocks
  double certified_sup_upper = 0.0;
  std::string tail_method;   // "sqrt-decay" or "am-gm"
};

/**
 * Upper bound on the supremum of the infinite quadratic form. The tail
 * rows are bounded by Gershgorin using monotone bounds on nu, p and |q|;
 * the tail couples to the truncated block through one entry e, so
 *   sup <= max eig [[truncated, e], [e, tail]].
 * For the printed q and gamma >= 1/5 the |q_n| <= 1/(4 sqrt(n + gamma))
 * bound is used, otherwise the AM-GM bound on the closed form.
 */
TridiagonalSup tridiagonal_sup(Family family, GammaShape gamma, int n_max,
                               QForm form = QForm::Consistent);

// (2 - max(S_A, S_B)) / 3 for the forms truncated at degree d. With the
// consistent q this equals the Galerkin long-range value at degree d.
double kappa_tilde_1_truncated(GammaShape gamma, int d, QForm form = QForm::Consistent);

struct KappaBracket {
  double gamma = 0.0;
  double lower = 0.0;  // (2 - certified sup) / 3
  double upper = 0.0;  // Galerkin long-range value at degree d
  TridiagonalSup sup_a;
  TridiagonalSup sup_b;
  QForm form = QForm::Consistent;
  double width() const { return upper - lower; }
};

// Thrown when the certificate lower bound exceeds the variational upper
// bound; carries the offending bracket.
struct BracketInversionError : NumericalError {
  BracketInversionError(const std::string& what, KappaBracket b)
      : NumericalError(what), bracket(b) {}
  KappaBracket bracket;
};

KappaBracket kappa_tilde_1_bracket(GammaShape gamma, int n_max, int d,
                                   QForm form = QForm::Consistent);

struct CertificateSequences {
  GammaShape gamma{1.0};
  QForm form = QForm::Printed;
  std::vector<double> alpha;  // index n; alpha[1] = 0
  std::vector<double> beta;   // index n; beta[0] = 0
  std::string regime;         // "small" (< 2/3), "middle" ([2/3, 2]), "large" (> 2)
  int n0 = 0;                 // first n with the scan inequality; -1 if not found
  double eta = 0.01;          // relative enlargement of the equality-case alphas
  double epsilon = 0.0;       // epsilon in beta_1
};

// Index from which |q_n| (1/(1 + 2|nu_n|) - 1/2)^{-1} < 1/2 holds, scanned
// up to `cap`; -1 if never reached.
int certificate_start_index(GammaShape gamma, QForm form = QForm::Printed, int cap = 10000);

CertificateSequences certificate_sequences(GammaShape gamma, int n_max,
                                           QForm form = QForm::Printed);

struct PropositionReport {
  Family family = Family::A;
  GammaShape gamma{1.0};
  QForm form = QForm::Printed;
  std::string regime;
  int n_max = 0;
  std::vector<double> values;  // values[n] of the certificate expression, 0 where undefined
  double max_value = 0.0;
  int argmax = 0;
  double tail_bound = 0.0;       // bound on the expression for n > n_max
  double limit_raw = 0.0;        // (1 + c nu_n)(1/2 + |q_n| + |q_{n-1}|) at n_max
  double limit_estimate = 0.0;   // parity-averaged, extrapolated in n^{-1/2}
  bool tail_monotone = false;    // parity-averaged expression decreasing over the last quarter
  std::vector<int> violations;   // n with value >= 1
  bool pass() const { return violations.empty() && max_value < 1.0 && tail_bound < 1.0; }
  double margin() const { return 1.0 - std::max(max_value, tail_bound); }
};

PropositionReport verify_prop_a(GammaShape gamma, int n_max, QForm form = QForm::Printed);
PropositionReport verify_prop_b(GammaShape gamma, int n_max, QForm form = QForm::Printed);

struct LemmaCheck {
  std::string lemma;
  double gamma = 0.0;
  int n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double margin() const { return rhs - lhs; }
};

/**
 * Checks every monotonicity and comparison lemma pointwise on the grid,
 * each only inside its stated gamma and n range. lhs < rhs (or <=, per
 * lemma) is the claim.
 */
std::vector<LemmaCheck> verify_monotonicity_lemmas(const std::vector<double>& gamma_grid,
                                                   int n_first, int n_last,
                                                   QForm form = QForm::Printed);

// Closed form against an independent route, |closed - reference| <= tolerance.
struct ConstantCheck {
  std::string name;
  double gamma = 0.0;
  int n = 0;
  double closed_form = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass() const { return std::abs(closed_form - reference) <= tolerance; }
};

struct BracketRecord {
  KappaBracket bracket;
  bool inverted = false;

  // Not inverted; for the consistent q, also lower > 1/3 and width < 5e-3.
  bool pass() const;
};

struct AppendixSuiteOptions {
  std::vector<double> constant_gammas{0.5, 1.0, 1.5};
  int constant_n_max = 10;
  std::vector<double> lemma_gammas{0.2, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0, 2.0, 3.0};
  int lemma_n_max = 50;
  std::vector<double> proposition_gammas{1.0 / 3.0, 0.4, 2.0 / 3.0, 1.0, 1.5, 2.0, 3.0};
  int proposition_n_max = 200;
  std::vector<double> bracket_gammas{0.4, 2.0 / 3.0, 1.0, 1.5, 2.0, 3.0};
  int bracket_n_max = 200;
  int bracket_degree = 8;
  std::uint64_t seed = 1;
};

/**
 * Everything the appendix reduction claims, evaluated on the default grids.
 * Propositions and brackets are computed for both q forms; `pass()` uses
 * the printed-form propositions, both q cross-checks and the
 * consistent-form bracket, which must be a non-inverted bracket whose lower
 * end exceeds 1/3.
 */
struct AppendixSuiteReport {
  std::vector<ConstantCheck> constants;
  std::vector<LemmaCheck> lemmas;
  std::vector<PropositionReport> propositions;             // printed q
  std::vector<PropositionReport> propositions_consistent;  // consistent q
  std::vector<BracketRecord> brackets;                     // both forms
  std::vector<TripleBasisReport> triple_basis;
  std::vector<double> triple_basis_gammas;

  int failed_constants() const;
  int failed_lemmas() const;
  int failed_propositions() const;
  int failed_brackets() const;
  bool pass() const;
};

AppendixSuiteReport run_appendix_suite(const AppendixSuiteOptions& options = {});

}  // namespace gapforge
