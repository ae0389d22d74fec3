#include <doctest.h>

#include <cmath>
#include <vector>

#include "gapforge/linalg.hpp"
#include "gapforge/quadrature.hpp"
#include "gapforge/rng.hpp"
#include "gapforge/special.hpp"
#include "oracles.hpp"

using namespace gapforge;

TEST_SUITE("numerics") {
  TEST_CASE("jacobi eigenpairs satisfy A v = lambda v on random symmetric matrices") {
    oracle::Gen gen(11);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = gen.integer(1, 12);
      Matrix<double> a(n, n);
      double trace = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) a(i, j) = a(j, i) = gen.uniform(-2.0, 2.0);
        trace += a(i, i);
      }
      const auto eig = jacobi_eigen(a, 1e-14);
      double sum = 0.0;
      for (int k = 0; k < n; ++k) {
        sum += eig.values[k];
        if (k > 0) CHECK(eig.values[k - 1] <= eig.values[k]);
        for (int i = 0; i < n; ++i) {
          double av = 0.0;
          for (int j = 0; j < n; ++j) av += a(i, j) * eig.vectors(j, k);
          CHECK(av == doctest::Approx(eig.values[k] * eig.vectors(i, k)).epsilon(1e-9).scale(1.0));
        }
      }
      CHECK(sum == doctest::Approx(trace).epsilon(1e-12).scale(1.0));
    }
  }

  TEST_CASE("2x2 eigenvalues match the closed form") {
    Matrix<double> a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = -1.0;
    a(0, 1) = a(1, 0) = 0.5;
    const auto eig = jacobi_eigen(a, 1e-15);
    const double mid = 0.5, rad = std::sqrt(1.5 * 1.5 + 0.25);
    CHECK(eig.values[0] == doctest::Approx(mid - rad).epsilon(1e-14));
    CHECK(eig.values[1] == doctest::Approx(mid + rad).epsilon(1e-14));
  }

  TEST_CASE("Sturm bisection agrees with dense Jacobi on tridiagonal matrices") {
    oracle::Gen gen(12);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = gen.integer(2, 15);
      std::vector<double> d(n), e(n - 1);
      Matrix<double> a(n, n);
      for (int i = 0; i < n; ++i) a(i, i) = d[i] = gen.uniform(-1.0, 1.0);
      for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = e[i] = gen.uniform(-1.0, 1.0);
      const auto eig = jacobi_eigen(a, 1e-15);
      for (int k = 0; k < n; ++k)
        CHECK(tridiagonal_eigenvalue<double>(d, e, k, 1e-14) ==
              doctest::Approx(eig.values[k]).epsilon(1e-10).scale(1.0));
    }
  }

  TEST_CASE("Gauss-Jacobi rules integrate Beta moments exactly up to degree 2n - 1") {
    for (double a : {0.5, 1.0, 1.5, 3.0})
      for (double b : {0.5, 2.0, 4.5})
        for (int n : {1, 4, 12}) {
          const auto rule = gauss_jacobi_beta(a, b, n);
          REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
          for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += rule.weights[k] * std::pow(rule.nodes[k], p);
            CHECK(s == doctest::Approx(oracle::beta_raw_moment(a, b, p)).epsilon(1e-12));
          }
        }
  }

  TEST_CASE("beta_cdf is the integral of the density") {
    for (double a : {0.4, 1.0, 2.5})
      for (double b : {0.7, 1.0, 3.0})
        for (double x : {0.05, 0.3, 0.5, 0.9}) {
          const double ref =
              oracle::tanh_sinh([&](double t) { return oracle::beta_pdf(t, a, b); }, 0.0, x);
          CHECK(beta_cdf(x, a, b) == doctest::Approx(ref).epsilon(1e-10));
          CHECK(beta_pdf(x, a, b) == doctest::Approx(oracle::beta_pdf(x, a, b)).epsilon(1e-12));
        }
  }

  TEST_CASE("derived streams are reproducible and distinct") {
    Rng a = make_stream(42, 3), b = make_stream(42, 3), c = make_stream(42, 4);
    const auto va = a(), vb = b(), vc = c();
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  }

  TEST_CASE("Beta sampler matches the first two moments") {
    Rng rng = make_stream(5, 0);
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0.5, 0.5}, {1.5, 1.5}, {2.0, 5.0}}) {
      const int n = 200000;
      double s1 = 0.0, s2 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double v = sample_beta(a, b, rng);
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
        s1 += v;
        s2 += v * v;
      }
      const double m1 = oracle::beta_raw_moment(a, b, 1), m2 = oracle::beta_raw_moment(a, b, 2);
      const double sd = std::sqrt((m2 - m1 * m1) / n);
      CHECK(std::abs(s1 / n - m1) < 5.0 * sd);
      CHECK(std::abs(s2 / n - m2) < 5.0 * sd);
    }
  }
}
