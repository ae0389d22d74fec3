#include <doctest.h>

#include <cmath>
#include <vector>

#include "gapforge/errors.hpp"
#include "gapforge/models.hpp"
#include "gapforge/rng.hpp"
#include "oracles.hpp"

using namespace gapforge;

namespace {

std::vector<ExchangeKernel> all_kernels() {
  return {star_kernel(0.0, GammaShape(1.0)), star_kernel(1.0, GammaShape(0.5)),
          star_kernel(0.5, GammaShape(2.0)), kmp_kernel(),
          stick_kernel(0.5), stick_kernel(1.0), stick_kernel(2.0),
          gg3_kernel(), gg2_kernel()};
}

// w(beta) Lambda_r(beta) P(beta, alpha) from the public kernel interface,
// with the Beta weight computed here.
double flux(const ExchangeKernel& k, double beta, double alpha) {
  return oracle::beta_pdf(beta, k.gamma(), k.gamma()) * k.reduced_rate(beta) *
         k.reduced_density(beta, alpha);
}

}  // namespace

TEST_SUITE("models") {
  TEST_CASE("detailed balance holds on an interior grid") {
    for (const auto& k : all_kernels()) {
      CAPTURE(k.id());
      CAPTURE(k.m());
      double worst = 0.0;
      for (int a = 1; a < 40; ++a)
        for (int b = 1; b < 40; ++b) {
          const double beta = (a + 0.37) / 41.0, alpha = (b + 0.61) / 41.0;
          if (std::abs(alpha - (1.0 - beta)) < 1e-3 || std::abs(alpha - beta) < 1e-3) continue;
          const double f = flux(k, beta, alpha), r = flux(k, alpha, beta);
          worst = std::max(worst, std::abs(f - r) / std::max(std::abs(f), std::abs(r)));
        }
      CHECK(worst < 1e-8);
    }
  }

  TEST_CASE("redistribution densities integrate to one") {
    for (const auto& k : all_kernels()) {
      CAPTURE(k.id());
      CAPTURE(k.m());
      for (double beta : {0.03, 0.2, 0.37, 0.5, 0.71, 0.9}) {
        CAPTURE(beta);
        const double total = oracle::integrate_unit(
            [&](double a) { return k.reduced_density(beta, a); }, {beta, 1.0 - beta, 0.5});
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("sampled alpha matches the density mean") {
    Rng rng = make_stream(9, 0);
    for (const auto& k : all_kernels()) {
      CAPTURE(k.id());
      for (double beta : {0.15, 0.6}) {
        const double a = beta * 3.0, b = (1.0 - beta) * 3.0;
        const double mean = oracle::integrate_unit(
            [&](double x) { return x * k.reduced_density(beta, x); }, {beta, 1.0 - beta, 0.5});
        const int n = 40000;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          const double x = k.sample_alpha(a, b, rng);
          REQUIRE(x >= 0.0);
          REQUIRE(x <= 1.0);
          s += x;
        }
        // alpha is in [0, 1], so its standard deviation is at most 1/2.
        CHECK(std::abs(s / n - mean) < 5.0 * 0.5 / std::sqrt(n));
      }
    }
  }

  TEST_CASE("rates are homogeneous of degree m") {
    oracle::Gen gen(31);
    for (const auto& k : all_kernels())
      for (int t = 0; t < 50; ++t) {
        const double a = gen.uniform(0.01, 4.0), b = gen.uniform(0.01, 4.0), l = gen.uniform(0.1, 10.0);
        CHECK(k.rate(l * a, l * b) ==
              doctest::Approx(std::pow(l, k.m()) * k.rate(a, b)).epsilon(1e-12));
        CHECK(k.rate(a, b) == doctest::Approx(k.rate(b, a)).epsilon(1e-12));
      }
  }

  TEST_CASE("stick reduced rate") {
    const auto k = stick_kernel(2.0);
    for (double beta : {0.1, 0.5, 0.8})
      CHECK(k.reduced_rate(beta) == doctest::Approx(beta * beta + (1 - beta) * (1 - beta)));
  }

  TEST_CASE("pair updates conserve the pair sum exactly") {
    oracle::Gen gen(32);
    for (int t = 0; t < 2000; ++t) {
      auto x = gen.energies(5);
      const int i = gen.integer(0, 4);
      int j = gen.integer(0, 3);
      if (j >= i) ++j;
      const double s = x[i] + x[j];
      apply_update(x, PairUpdate{i, j, gen.uniform(0.0, 1.0)});
      CHECK(x[i] + x[j] == s);
      CHECK(x[i] >= 0.0);
      CHECK(x[j] >= 0.0);
    }
  }

  TEST_CASE("kernel lookup") {
    CHECK(make_kernel("star", 0.5, 2.0).gamma() == 2.0);
    CHECK(make_kernel("gg3", 0.5, 1.5).kind() == KernelKind::Gg3);
    CHECK_THROWS_AS(make_kernel("gg3", 0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(make_kernel("kmp", 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(make_kernel("nope", 0.0, 1.0), ConfigError);
    CHECK_FALSE(star_kernel(-1.0, GammaShape(1.0)).certified());
  }
}
