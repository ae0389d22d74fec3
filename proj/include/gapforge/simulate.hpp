#pragma once

/**
 * @file simulate.hpp
 * @brief Exact event-driven simulation of the exchange dynamics and a
 * Monte Carlo gap estimator based on autocorrelation decay.
 */

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "gapforge/galerkin.hpp"
#include "gapforge/measures.hpp"
#include "gapforge/models.hpp"
#include "gapforge/rng.hpp"
#include "gapforge/topology.hpp"

namespace gapforge {

/**
 * Gillespie simulator. Nearest-neighbour bond rates live in a segment sum
 * tree, so an event touches at most three leaves. Long-range keeps the full
 * pair-rate matrix with per-site row sums; the row sums are rebuilt every N
 * events to bound drift.
 */
class Simulator {
 public:
  Simulator(ExchangeKernel kernel, Topology topo, std::vector<double> initial);

  double time() const { return time_; }
  std::uint64_t events() const { return events_; }
  const std::vector<double>& state() const { return x_; }
  double total_rate() const;

  // Absolute time of the pending event (drawn once, then cached until
  // fire()). Infinite when the total rate is zero.
  double next_event_time(Rng& rng);
  // Performs the pending event: picks a pair proportionally to its rate,
  // draws alpha from the kernel and moves the clock.
  PairUpdate fire(Rng& rng);

 private:
  void set_bond(int b, double rate);
  void refresh_long_range();
  void update_site_rates(int site);

  ExchangeKernel kernel_;
  Topology topo_;
  std::vector<double> x_;
  double time_ = 0.0;
  double pending_ = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t events_ = 0;
  // nearest-neighbour: sum tree over bonds k = (k, k+1)
  std::size_t leaves_ = 0;
  std::vector<double> tree_;
  // long-range: rate matrix and per-site sums
  std::vector<double> pair_rate_;
  std::vector<double> site_rate_;
};

struct Trajectory {
  EnergyConfiguration initial;
  std::vector<double> event_times;
  std::vector<PairUpdate> events;
  std::vector<double> sample_times;
  std::vector<std::vector<double>> samples;
  bool stalled = false;  // zero total rate reached before t_max
};

struct RunOptions {
  double sample_stride = 0.0;        // time between recorded snapshots; 0 disables
  bool record_events = true;
  std::uint64_t max_events = 0;      // 0 means unlimited
};

Trajectory run(const ExchangeKernel& kernel, const Topology& topo, const SimplexLaw& law,
               double t_max, Rng& rng, const RunOptions& options = {});

// CSV with header time,x_1,...,x_N over the recorded snapshots.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

struct Observable {
  std::string id;
  std::function<double(const std::vector<double>&)> f;
};

// Centered x_1 and centered x_1^2 under the law.
// The slowest Galerkin mode as an observable, id "galerkin-mode".
Observable galerkin_observable(const GapEstimateVar& gap, const SimplexLaw& law);

std::vector<Observable> default_observables(const SimplexLaw& law);

struct GapEstimateMC {
  double value = 0.0;
  double stderr_ = 0.0;
  std::string observable;
  int window_first_lag = 0;
  int window_last_lag = 0;
  double r_squared = 0.0;
  double sample_interval = 0.0;
  std::uint64_t events = 0;
  bool flagged = false;  // fit failure: R^2 < 0.95 or an empty window
  std::string note;
};

struct EstimatorOptions {
  int batches = 20;
  int lags = 40;
  double pilot_fraction = 0.1;  // also serves as burn-in
  double rho_high = 0.8;
  double rho_low = 0.05;
  int replicas = 1;             // independent chains run on separate threads
};

/**
 * Autocorrelation gap estimator. A pilot run (the first 10% of the event
 * budget) gives a crude decay rate lambda_p; the main run samples every
 * 0.23 / lambda_p time units, accumulates lagged products in batches, and
 * fits log rho(k) over the contiguous lags with rho in [0.05, 0.8]. The
 * reported value is the slowest-decaying observable; stderr is the batch
 * spread divided by sqrt(batches).
 */
GapEstimateMC estimate_gap_autocorr(const ExchangeKernel& kernel, const Topology& topo,
                                    const SimplexLaw& law, const std::vector<Observable>& observables,
                                    std::uint64_t budget, std::uint64_t seed,
                                    const EstimatorOptions& options = {});

struct EquilibriumReport {
  double ks_statistic = 0.0;
  double critical_value = 0.0;  // 1% level
  std::size_t samples = 0;
  double stride = 0.0;
  bool pass = false;
};

// KS distance between thinned single-site values x_k / (N E) (site rotating
// with each sample) and Beta(gamma, (N-1) gamma).
EquilibriumReport equilibrium_check(const ExchangeKernel& kernel, const Topology& topo,
                                    const SimplexLaw& law, std::uint64_t budget, Rng& rng);

// One-sample KS statistic of `data` (sorted in place) against `cdf`.
double ks_statistic(std::vector<double>& data, const std::function<double(double)>& cdf);
// Asymptotic 1% critical value with the finite-n correction of Stephens.
double ks_critical_1pct(std::size_t n);

}  // namespace gapforge
