#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "gapforge/errors.hpp"
#include "gapforge/measures.hpp"
#include "oracles.hpp"

using namespace gapforge;

TEST_SUITE("measures") {
  TEST_CASE("Dirichlet moments match the Gamma-function formula") {
    oracle::Gen gen(21);
    for (int trial = 0; trial < 200; ++trial) {
      const int N = gen.integer(2, 6);
      const double g = gen.uniform(0.2, 3.0);
      MultiIndex k;
      k.exponents.resize(N);
      for (int& e : k.exponents) e = gen.integer(0, 4);
      CHECK(dirichlet_moment(GammaShape(g), N, k) ==
            doctest::Approx(oracle::dirichlet_moment(g, k.exponents)).epsilon(1e-12));
    }
  }

  TEST_CASE("marginal moments are Beta(gamma, (N - 1) gamma) moments") {
    for (double g : {0.5, 1.0, 2.0})
      for (int N : {2, 3, 7})
        for (int p = 0; p <= 6; ++p)
          CHECK(marginal_moment(GammaShape(g), N, p) ==
                doctest::Approx(oracle::beta_raw_moment(g, (N - 1) * g, p)).epsilon(1e-12));
  }

  TEST_CASE("pair alpha moments are Beta(gamma, gamma) moments") {
    for (double g : {0.5, 1.0, 1.5})
      for (int p = 0; p <= 4; ++p)
        for (int q = 0; q <= 4; ++q) {
          const double ref = oracle::dirichlet_moment(g, {p, q});
          CHECK(pair_alpha_moment(GammaShape(g), p, q) == doctest::Approx(ref).epsilon(1e-12));
        }
  }

  TEST_CASE("sampled configurations lie on the simplex with the right marginal mean") {
    const SimplexLaw law(GammaShape(1.5), 2.0, 5);
    Rng rng = make_stream(3, 0);
    double sum_x1 = 0.0, sum_x1_sq = 0.0;
    const int n = 50000;
    for (int k = 0; k < n; ++k) {
      const auto c = sample_configuration(law, rng);
      REQUIRE(c.x.size() == 5u);
      CHECK_NOTHROW(c.validate());
      sum_x1 += c.x[0];
      sum_x1_sq += c.x[0] * c.x[0];
    }
    // x_1 / (N E) ~ Beta(gamma, (N - 1) gamma)
    const double scale = law.total_energy();
    const double m1 = scale * oracle::beta_raw_moment(1.5, 6.0, 1);
    const double m2 = scale * scale * oracle::beta_raw_moment(1.5, 6.0, 2);
    const double sd = std::sqrt((m2 - m1 * m1) / n);
    CHECK(std::abs(sum_x1 / n - m1) < 5.0 * sd);
  }

  TEST_CASE("invalid shapes and configurations are rejected") {
    CHECK_THROWS_AS(GammaShape(0.0), ConfigError);
    CHECK_THROWS_AS(GammaShape(-1.0), ConfigError);
    CHECK_THROWS_AS(SimplexLaw(GammaShape(1.0), -1.0, 3), ConfigError);
    EnergyConfiguration c;
    c.x = {1.0, 2.0};
    c.mean_energy = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.x = {1.0, 1.0};
    CHECK_NOTHROW(c.validate());
  }
}
