#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gapforge/errors.hpp"
#include "gapforge/simulate.hpp"

using namespace gapforge;

TEST_SUITE("simulate") {
  TEST_CASE("trajectories conserve total energy and stay positive") {
    for (const auto& k : {star_kernel(1.0, GammaShape(0.5)), stick_kernel(2.0), gg3_kernel(), gg2_kernel()})
      for (auto kind : {TopologyKind::NearestNeighbor, TopologyKind::LongRange}) {
        CAPTURE(k.id());
        const SimplexLaw law(GammaShape(k.gamma()), 1.5, 6);
        Rng rng = make_stream(17, 0);
        RunOptions opt;
        opt.sample_stride = 0.25;
        const auto traj = run(k, Topology(kind, 6), law, 20.0, rng, opt);
        REQUIRE(traj.samples.size() > 10);
        CHECK(traj.events.size() > 0);
        for (const auto& s : traj.samples) {
          double total = 0.0;
          for (double v : s) {
            CHECK(v >= 0.0);
            total += v;
          }
          CHECK(total == doctest::Approx(law.total_energy()).epsilon(1e-12));
        }
      }
  }

  TEST_CASE("event count matches the constant total rate of KMP") {
    // Nearest-neighbour KMP on N sites has total rate N - 1 whatever the state.
    const int N = 5;
    const double t_max = 2000.0;
    Rng rng = make_stream(23, 0);
    RunOptions opt;
    opt.record_events = true;
    const auto traj = run(kmp_kernel(), Topology(TopologyKind::NearestNeighbor, N),
                          SimplexLaw(GammaShape(1.0), 1.0, N), t_max, rng, opt);
    const double expected = (N - 1) * t_max;
    CHECK(std::abs(static_cast<double>(traj.events.size()) - expected) < 5.0 * std::sqrt(expected));
  }

  TEST_CASE("trajectory CSV is bit-stable for a fixed seed") {
    auto dump = [] {
      Rng rng = make_stream(99, 1);
      RunOptions opt;
      opt.sample_stride = 0.5;
      opt.record_events = false;
      const auto traj = run(stick_kernel(1.0), Topology(TopologyKind::LongRange, 4),
                            SimplexLaw(GammaShape(1.0), 1.0, 4), 10.0, rng, opt);
      std::ostringstream s;
      write_trajectory_csv(traj, s);
      return s.str();
    };
    const std::string a = dump(), b = dump();
    CHECK(a == b);
    CHECK(a.rfind("time,x_1,x_2,x_3,x_4\n", 0) == 0);
  }

  TEST_CASE("stationary marginal passes the KS check") {
    Rng rng = make_stream(4, 0);
    const auto rep = equilibrium_check(star_kernel(0.0, GammaShape(1.0)),
                                       Topology(TopologyKind::NearestNeighbor, 3),
                                       SimplexLaw(GammaShape(1.0), 1.0, 3), 200000, rng);
    CHECK(rep.pass);
    CHECK(rep.ks_statistic < rep.critical_value);
  }

  TEST_CASE("autocorrelation estimate recovers the exact two-site KMP gap") {
    const SimplexLaw law(GammaShape(1.0), 1.0, 2);
    const auto est = estimate_gap_autocorr(kmp_kernel(), Topology(TopologyKind::LongRange, 2), law,
                                           default_observables(law), 400000, 5);
    CHECK_FALSE(est.flagged);
    CHECK(est.stderr_ > 0.0);
    CHECK(std::abs(est.value - 0.5) < 4.0 * est.stderr_);
  }

  TEST_CASE("simulator rejects a mismatched configuration") {
    CHECK_THROWS_AS(Simulator(kmp_kernel(), Topology(TopologyKind::NearestNeighbor, 3), {1.0, 2.0}),
                    ConfigError);
  }
}
