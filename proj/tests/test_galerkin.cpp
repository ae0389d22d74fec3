#include <doctest.h>

#include <cmath>

#include "gapforge/galerkin.hpp"
#include "oracles.hpp"

using namespace gapforge;

namespace {

double lr_gap(const ExchangeKernel& k, double E, int N, int d) {
  return galerkin_gap(k, Topology(TopologyKind::LongRange, N), SimplexLaw(GammaShape(k.gamma()), E, N), d)
      .value;
}

double nn_gap(const ExchangeKernel& k, double E, int N, int d) {
  return galerkin_gap(k, Topology(TopologyKind::NearestNeighbor, N),
                      SimplexLaw(GammaShape(k.gamma()), E, N), d)
      .value;
}

}  // namespace

TEST_SUITE("galerkin") {
  TEST_CASE("long-range m = 0 gap equals (gamma N + 1) / (N (2 gamma + 1))") {
    for (double g : {0.5, 1.0, 1.5, 2.0})
      for (int N = 2; N <= 6; ++N) {
        const double exact = (g * N + 1.0) / (N * (2.0 * g + 1.0));
        CHECK(lr_gap(star_kernel(0.0, GammaShape(g)), 1.0, N, 3) ==
              doctest::Approx(exact).epsilon(1e-8).scale(0.0));
      }
  }

  TEST_CASE("two-site star gap is 2^m E^m") {
    for (double m : {0.0, 0.5, 1.0, 2.0})
      for (double E : {0.5, 1.0, 2.0}) {
        const double v = nn_gap(star_kernel(m, GammaShape(1.0)), E, 2, default_degree(2));
        CHECK(v == doctest::Approx(std::pow(2.0 * E, m)).epsilon(1e-6));
      }
  }

  TEST_CASE("gap scales as E^m") {
    oracle::Gen gen(41);
    for (int t = 0; t < 8; ++t) {
      const double m = gen.uniform(0.0, 2.0), g = gen.uniform(0.5, 2.0), E = gen.uniform(0.2, 5.0);
      const int N = gen.integer(2, 4);
      const auto k = star_kernel(m, GammaShape(g));
      CHECK(nn_gap(k, E, N, 3) == doctest::Approx(std::pow(E, m) * nn_gap(k, 1.0, N, 3)).epsilon(1e-10));
    }
  }

  TEST_CASE("degree history is non-increasing") {
    for (const auto& k : {star_kernel(1.0, GammaShape(1.0)), stick_kernel(2.0), gg3_kernel()}) {
      const auto g = galerkin_gap(k, Topology(TopologyKind::NearestNeighbor, 3),
                                  SimplexLaw(GammaShape(k.gamma()), 1.0, 3), 4);
      REQUIRE(g.history.size() == 4u);
      for (std::size_t d = 1; d < g.history.size(); ++d) CHECK(g.history[d] <= g.history[d - 1] + 1e-10);
      CHECK(g.value == g.history.back());
    }
  }

  TEST_CASE("two-site long-range gap is half the nearest-neighbour gap") {
    const auto k = star_kernel(0.5, GammaShape(1.0));
    CHECK(lr_gap(k, 1.0, 2, 4) == doctest::Approx(0.5 * nn_gap(k, 1.0, 2, 4)).epsilon(1e-10));
  }

  TEST_CASE("three-site constants") {
    const auto k0 = kappa(0.0, GammaShape(1.0), 4);
    // m = 0: long-range at N = 3, total energy 1, is (3 + 1) / (3 * 3).
    CHECK(k0.kappa_tilde == doctest::Approx(4.0 / 9.0).epsilon(1e-10));
    const auto k1 = kappa(1.0, GammaShape(1.0), 8);
    CHECK(k1.kappa_tilde > 1.0 / 3.0);
    CHECK(k1.kappa_tilde < 0.342);
    CHECK(3.0 * k1.kappa_tilde >= k1.kappa);
  }

  TEST_CASE("two-site constants") {
    const auto s1 = two_site_constant(stick_kernel(1.0));
    CHECK(s1.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s1.plateau() < 1e-6);
    CHECK(two_site_constant(gg2_kernel()).value >= std::sqrt(1.0 / (2.0 * std::numbers::pi)));
    // Star kernel: C~ = lambda(1, 2) / Lambda_s(2) = 1.
    CHECK(two_site_constant(star_kernel(0.0, GammaShape(1.0))).value == doctest::Approx(1.0).epsilon(1e-8));
  }
}
