#include <doctest.h>

#include <cmath>

#include "gapforge/appendix.hpp"
#include "gapforge/galerkin.hpp"
#include "oracles.hpp"

using namespace gapforge;

namespace {

// (-1)^n E[B^n] with B ~ Beta(gamma, gamma).
double nu_reference(double g, int n) { return (n % 2 ? -1.0 : 1.0) * oracle::beta_raw_moment(g, g, n); }

}  // namespace

TEST_SUITE("appendix") {
  TEST_CASE("nu_n matches signed Beta moments") {
    for (double g : {0.2, 0.5, 1.0, 1.5, 3.0})
      for (int n = 0; n <= 12; ++n)
        CHECK(nu_n(GammaShape(g), n) == doctest::Approx(nu_reference(g, n)).epsilon(1e-12));
  }

  TEST_CASE("nu_1 is -1/2 for every gamma") {
    oracle::Gen gen(51);
    for (int t = 0; t < 100; ++t) CHECK(std::abs(nu_n(GammaShape(gen.uniform(0.05, 10.0)), 1) + 0.5) < 1e-12);
  }

  TEST_CASE("p_n is 1/2 at gamma = 2/3") {
    for (int n = 1; n <= 60; ++n) CHECK(std::abs(p_n(GammaShape(2.0 / 3.0), n) - 0.5) < 1e-12);
  }

  TEST_CASE("p_n and the consistent q_n agree with quadrature") {
    for (double g : {0.5, 1.0, 1.5})
      for (int n = 1; n <= 10; ++n) {
        const auto quad = constants_by_quadrature(GammaShape(g), n);
        CHECK(p_n(GammaShape(g), n) == doctest::Approx(quad.p).epsilon(1e-8).scale(1.0));
        CHECK(q_n(GammaShape(g), n, QForm::Consistent) == doctest::Approx(quad.q).epsilon(1e-8).scale(1.0));
      }
  }

  TEST_CASE("printed and consistent q_n differ by sqrt(n + 2 gamma)") {
    for (double g : {0.5, 1.0, 2.0})
      for (int n = 1; n <= 8; ++n) {
        const double printed = q_n(GammaShape(g), n, QForm::Printed);
        const double consistent = q_n(GammaShape(g), n, QForm::Consistent);
        CHECK(std::abs(consistent / printed) ==
              doctest::Approx(std::sqrt(n + 2.0 * g)).epsilon(1e-10));
      }
  }

  TEST_CASE("consistent |q_n| tends to 1/4") {
    CHECK(std::abs(q_n(GammaShape(1.0), 4000, QForm::Consistent)) == doctest::Approx(0.25).epsilon(1e-3));
  }

  TEST_CASE("conditional eigenrelation") {
    for (double g : {0.5, 1.0, 2.0})
      for (int n = 1; n <= 6; ++n) CHECK(verify_conditional_eigenrelation(GammaShape(g), n) < 1e-8);
  }

  TEST_CASE("monotonicity lemmas have no violations") {
    const auto checks = verify_monotonicity_lemmas({0.2, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0, 2.0, 3.0}, 1, 50);
    CHECK(checks.size() > 100);
    for (const auto& c : checks) {
      CAPTURE(c.lemma);
      CAPTURE(c.gamma);
      CAPTURE(c.n);
      CHECK(c.pass);
    }
  }

  TEST_CASE("certificate expressions stay below one with the printed q") {
    for (double g : {1.0 / 3.0, 0.4, 2.0 / 3.0, 1.0, 1.5, 2.0, 3.0}) {
      CAPTURE(g);
      const auto a = verify_prop_a(GammaShape(g), 200);
      const auto b = verify_prop_b(GammaShape(g), 200);
      CHECK(a.pass());
      CHECK(b.pass());
      CHECK(std::abs(a.limit_estimate - 0.5) < 1e-2);
      CHECK(std::abs(b.limit_estimate - 0.5) < 1e-2);
    }
  }

  TEST_CASE("tridiagonal truncation reproduces the long-range Galerkin value with the consistent q") {
    for (double g : {0.5, 1.0, 2.0})
      for (int d : {3, 5}) {
        const double reduced = kappa_tilde_1_truncated(GammaShape(g), d, QForm::Consistent);
        const double galerkin = kappa(1.0, GammaShape(g), d).kappa_tilde;
        CHECK(reduced == doctest::Approx(galerkin).epsilon(1e-9));
      }
  }

  TEST_CASE("printed-q bracket is inverted") {
    CHECK_THROWS_AS(kappa_tilde_1_bracket(GammaShape(1.0), 200, 8, QForm::Printed), BracketInversionError);
    const auto b = kappa_tilde_1_bracket(GammaShape(1.0), 200, 8, QForm::Consistent);
    CHECK(b.lower <= b.upper);
    CHECK(b.lower < 1.0 / 3.0);
  }

  TEST_CASE("triple basis") {
    const auto r = check_triple_basis(GammaShape(1.0), 6, 300, 3);
    CHECK(r.max_f1 < 1e-10);
    CHECK(r.max_cross_correlation < 1e-10);
  }
}
