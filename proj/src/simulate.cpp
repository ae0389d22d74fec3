#include "gapforge/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "gapforge/errors.hpp"
#include "gapforge/special.hpp"

namespace gapforge {

Simulator::Simulator(ExchangeKernel kernel, Topology topo, std::vector<double> initial)
    : kernel_(std::move(kernel)), topo_(topo), x_(std::move(initial)) {
  if (static_cast<int>(x_.size()) != topo_.N)
    throw ConfigError("Simulator: configuration length differs from topology N");
  const int N = topo_.N;
  if (topo_.kind == TopologyKind::NearestNeighbor) {
    leaves_ = 1;
    while (leaves_ < static_cast<std::size_t>(N - 1)) leaves_ *= 2;
    tree_.assign(2 * leaves_, 0.0);
    for (int b = 0; b + 1 < N; ++b) set_bond(b, kernel_.rate(x_[b], x_[b + 1]));
  } else {
    pair_rate_.assign(static_cast<std::size_t>(N) * N, 0.0);
    site_rate_.assign(N, 0.0);
    const double w = topo_.bond_weight();
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j)
        pair_rate_[i * N + j] = pair_rate_[j * N + i] = w * kernel_.rate(x_[i], x_[j]);
    refresh_long_range();
  }
}

void Simulator::set_bond(int b, double rate) {
  std::size_t node = leaves_ + b;
  tree_[node] = rate;
  for (node /= 2; node >= 1; node /= 2) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
}

void Simulator::refresh_long_range() {
  const int N = topo_.N;
  for (int i = 0; i < N; ++i) {
    double s = 0.0;
    for (int j = 0; j < N; ++j) s += pair_rate_[i * N + j];
    site_rate_[i] = s;
  }
}

void Simulator::update_site_rates(int site) {
  const int N = topo_.N;
  const double w = topo_.bond_weight();
  double own = 0.0;
  for (int k = 0; k < N; ++k) {
    if (k == site) continue;
    const int lo = std::min(site, k), hi = std::max(site, k);
    const double r = w * kernel_.rate(x_[lo], x_[hi]);
    site_rate_[k] += r - pair_rate_[k * N + site];
    pair_rate_[k * N + site] = pair_rate_[site * N + k] = r;
    own += r;
  }
  site_rate_[site] = own;
}

double Simulator::total_rate() const {
  if (topo_.kind == TopologyKind::NearestNeighbor) return tree_[1];
  double s = 0.0;
  for (double r : site_rate_) s += r;
  return 0.5 * s;
}

double Simulator::next_event_time(Rng& rng) {
  if (std::isnan(pending_)) {
    const double rate = total_rate();
    pending_ = rate > 0.0 ? time_ + sample_exponential(rate, rng)
                          : std::numeric_limits<double>::infinity();
  }
  return pending_;
}

PairUpdate Simulator::fire(Rng& rng) {
  const double t = next_event_time(rng);
  if (!std::isfinite(t)) throw NumericalError("Simulator: total rate is zero");
  const int N = topo_.N;
  int i = 0, j = 1;
  if (topo_.kind == TopologyKind::NearestNeighbor) {
    for (;;) {
      double u = uniform01(rng) * tree_[1];
      std::size_t node = 1;
      while (node < leaves_) {
        if (u < tree_[2 * node] || tree_[2 * node + 1] <= 0.0) {
          node = 2 * node;
        } else {
          u -= tree_[2 * node];
          node = 2 * node + 1;
        }
      }
      const int b = static_cast<int>(node - leaves_);
      if (b < N - 1 && tree_[node] > 0.0) {
        i = b;
        j = b + 1;
        break;
      }
    }
  } else {
    double total = 0.0;
    for (double r : site_rate_) total += r;
    for (;;) {
      double u = uniform01(rng) * total;
      int a = 0;
      while (a + 1 < N && u >= site_rate_[a]) u -= site_rate_[a++];
      double v = uniform01(rng) * site_rate_[a];
      int b = 0;
      for (; b < N; ++b) {
        if (b == a) continue;
        if (v < pair_rate_[a * N + b]) break;
        v -= pair_rate_[a * N + b];
      }
      if (b < N && pair_rate_[a * N + b] > 0.0) {
        i = std::min(a, b);
        j = std::max(a, b);
        break;
      }
    }
  }
  PairUpdate u{i, j, kernel_.sample_alpha(x_[i], x_[j], rng)};
  apply_update(x_, u);
  if (topo_.kind == TopologyKind::NearestNeighbor) {
    for (int b = std::max(0, i - 1); b <= std::min(N - 2, i + 1); ++b)
      set_bond(b, kernel_.rate(x_[b], x_[b + 1]));
  } else {
    update_site_rates(i);
    update_site_rates(j);
    if ((events_ + 1) % static_cast<std::uint64_t>(N) == 0) refresh_long_range();
  }
  time_ = t;
  pending_ = std::numeric_limits<double>::quiet_NaN();
  ++events_;
  return u;
}

Trajectory run(const ExchangeKernel& kernel, const Topology& topo, const SimplexLaw& law,
               double t_max, Rng& rng, const RunOptions& options) {
  if (!(t_max > 0.0)) throw ConfigError("run: t_max must be positive");
  if (topo.N != law.sites) throw ConfigError("run: topology and law disagree on N");
  Trajectory traj;
  traj.initial = sample_configuration(law, rng);
  Simulator sim(kernel, topo, traj.initial.x);
  double next_sample = 0.0;
  auto record_until = [&](double t) {
    if (!(options.sample_stride > 0.0)) return;
    while (next_sample <= t && next_sample <= t_max) {
      traj.sample_times.push_back(next_sample);
      traj.samples.push_back(sim.state());
      next_sample += options.sample_stride;
    }
  };
  for (;;) {
    const double t = sim.next_event_time(rng);
    if (!std::isfinite(t)) {
      traj.stalled = true;
      record_until(t_max);
      break;
    }
    if (t > t_max) {
      record_until(t_max);
      break;
    }
    record_until(std::nextafter(t, 0.0));
    const PairUpdate u = sim.fire(rng);
    if (options.record_events) {
      traj.event_times.push_back(t);
      traj.events.push_back(u);
    }
    if (options.max_events && sim.events() >= options.max_events) break;
  }
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const std::size_t N = traj.initial.x.size();
  out << "time";
  for (std::size_t k = 1; k <= N; ++k) out << ",x_" << k;
  out << '\n';
  char buf[64];
  for (std::size_t s = 0; s < traj.samples.size(); ++s) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.sample_times[s]);
    out << buf;
    for (double v : traj.samples[s]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

Observable galerkin_observable(const GapEstimateVar& gap, const SimplexLaw& law) {
  const double total = law.total_energy();
  return {"galerkin-mode", [gap, total](const std::vector<double>& x) { return evaluate_mode(gap, x, total); }};
}

std::vector<Observable> default_observables(const SimplexLaw& law) {
  const double E = law.mean_energy;
  const double T = law.total_energy();
  const double second = T * T * marginal_moment(law.gamma, law.sites, 2);
  return {
      {"x1", [E](const std::vector<double>& x) { return x[0] - E; }},
      {"x1^2", [second](const std::vector<double>& x) { return x[0] * x[0] - second; }},
  };
}

namespace {

// Running lagged moments of one observable over one batch.
struct LagStats {
  std::size_t n = 0;
  double sum = 0.0, sum2 = 0.0;
  std::vector<std::size_t> pairs;
  std::vector<double> cross, lead, trail;

  explicit LagStats(int lags = 0) : pairs(lags + 1), cross(lags + 1), lead(lags + 1), trail(lags + 1) {}

  void merge(const LagStats& o) {
    n += o.n;
    sum += o.sum;
    sum2 += o.sum2;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      pairs[k] += o.pairs[k];
      cross[k] += o.cross[k];
      lead[k] += o.lead[k];
      trail[k] += o.trail[k];
    }
  }

  // Normalized autocorrelation at lag k; NaN when undefined.
  double rho(int k) const {
    if (n < 2 || pairs[k] < 2) return std::nan("");
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    if (!(var > 0.0)) return std::nan("");
    const double m = static_cast<double>(pairs[k]);
    const double cov = cross[k] / m - (lead[k] / m) * (trail[k] / m);
    return cov / var;
  }
};

// History ring shared by all observables of a chain.
struct Accumulator {
  int lags;
  std::vector<std::vector<double>> ring;  // per observable
  std::size_t count = 0;

  Accumulator(std::size_t obs, int lags_) : lags(lags_), ring(obs, std::vector<double>(lags_ + 1)) {}

  void push(std::size_t o, double v, LagStats& st) {
    const std::size_t L = static_cast<std::size_t>(lags) + 1;
    auto& r = ring[o];
    r[count % L] = v;
    st.n += 1;
    st.sum += v;
    st.sum2 += v * v;
    for (int k = 0; k <= lags && static_cast<std::size_t>(k) <= count; ++k) {
      const double prev = r[(count - k) % L];
      st.pairs[k] += 1;
      st.cross[k] += v * prev;
      st.lead[k] += v;
      st.trail[k] += prev;
    }
  }
};

struct Fit {
  double lambda = std::nan("");
  double r2 = 0.0;
  int first = 0, last = -1;
  bool ok = false;
};

Fit fit_window(const std::vector<double>& rho, double hi, double lo) {
  Fit fit;
  int k = 1;
  const int K = static_cast<int>(rho.size()) - 1;
  while (k <= K && rho[k] > hi) ++k;
  fit.first = k;
  while (k <= K && rho[k] >= lo) ++k;
  fit.last = k - 1;
  return fit;
}

void regress(const std::vector<double>& rho, double dt, Fit& fit) {
  const int cnt = fit.last - fit.first + 1;
  if (cnt < 2) {
    fit.ok = false;
    return;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int k = fit.first; k <= fit.last; ++k) {
    if (!(rho[k] > 0.0)) {
      fit.ok = false;
      return;
    }
    const double x = k * dt, y = std::log(rho[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double n = cnt;
  const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
  const double slope = cxy / cxx;
  fit.lambda = -slope;
  fit.r2 = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
  fit.ok = std::isfinite(fit.lambda) && fit.lambda > 0.0;
}

// Crude decay rate from a stored series sampled every dt.
double pilot_rate(const std::vector<double>& series, double dt, double hi, double lo) {
  const std::size_t n = series.size();
  if (n < 10) return std::nan("");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= n;
  if (!(var > 0.0)) return std::nan("");
  std::vector<double> rho{1.0};
  const std::size_t max_lag = std::min<std::size_t>(2000, n / 10);
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double c = 0.0;
    for (std::size_t t = k; t < n; ++t) c += (series[t] - mean) * (series[t - k] - mean);
    rho.push_back(c / (n - k) / var);
    if (rho.back() < lo) break;
  }
  Fit fit = fit_window(rho, hi, lo);
  regress(rho, dt, fit);
  if (fit.ok) return fit.lambda;
  // Decorrelates within one step, or never within the lag cap.
  const double r1 = rho.size() > 1 ? rho[1] : 0.0;
  if (r1 < lo) return -std::log(lo) / dt;
  return -std::log(std::min(std::max(rho.back(), lo), hi)) / (dt * (rho.size() - 1));
}

struct PilotResult {
  double lambda = 0.0;
  double dt = 0.0;
};

// Runs `events` events on `sim`, sampling every 1/(initial total rate), and
// returns the smallest per-observable crude decay rate.
PilotResult run_pilot(Simulator& sim, Rng& rng, const std::vector<Observable>& obs,
                      std::uint64_t events, double hi, double lo) {
  PilotResult out;
  out.dt = 1.0 / sim.total_rate();
  std::vector<std::vector<double>> series(obs.size());
  double next = sim.time();
  const std::uint64_t stop = sim.events() + events;
  while (sim.events() < stop) {
    const double t = sim.next_event_time(rng);
    while (next < t) {
      for (std::size_t o = 0; o < obs.size(); ++o) series[o].push_back(obs[o].f(sim.state()));
      next += out.dt;
    }
    sim.fire(rng);
  }
  out.lambda = std::numeric_limits<double>::infinity();
  for (auto& s : series) {
    const double l = pilot_rate(s, out.dt, hi, lo);
    if (std::isfinite(l) && l > 0.0) out.lambda = std::min(out.lambda, l);
  }
  if (!std::isfinite(out.lambda)) out.lambda = 1.0 / out.dt;
  return out;
}

struct ChainResult {
  std::vector<std::vector<LagStats>> batches;  // [batch][observable]
};

void run_main(Simulator& sim, Rng& rng, const std::vector<Observable>& obs, std::uint64_t events,
              double dt, int batches, int lags, ChainResult& res) {
  res.batches.assign(batches, std::vector<LagStats>(obs.size(), LagStats(lags)));
  Accumulator acc(obs.size(), lags);
  const std::uint64_t start = sim.events();
  const std::uint64_t per = std::max<std::uint64_t>(1, events / batches);
  double next = sim.time();
  while (sim.events() - start < events) {
    const double t = sim.next_event_time(rng);
    const int b = static_cast<int>(std::min<std::uint64_t>((sim.events() - start) / per, batches - 1));
    while (next < t) {
      for (std::size_t o = 0; o < obs.size(); ++o)
        acc.push(o, obs[o].f(sim.state()), res.batches[b][o]);
      ++acc.count;
      next += dt;
    }
    sim.fire(rng);
  }
}

}  // namespace

GapEstimateMC estimate_gap_autocorr(const ExchangeKernel& kernel, const Topology& topo,
                                    const SimplexLaw& law, const std::vector<Observable>& observables,
                                    std::uint64_t budget, std::uint64_t seed,
                                    const EstimatorOptions& opt) {
  if (observables.empty()) throw ConfigError("estimate_gap_autocorr: no observables");
  if (opt.batches < 2 || opt.lags < 2 || opt.replicas < 1)
    throw ConfigError("estimate_gap_autocorr: invalid estimator options");
  const int R = opt.replicas;
  const std::uint64_t per_replica = budget / R;
  const std::uint64_t pilot_events =
      static_cast<std::uint64_t>(opt.pilot_fraction * static_cast<double>(per_replica));
  const std::uint64_t main_events = per_replica - pilot_events;

  std::vector<Rng> rngs;
  std::vector<Simulator> sims;
  for (int r = 0; r < R; ++r) {
    rngs.push_back(make_stream(seed, static_cast<std::uint64_t>(r)));
    sims.emplace_back(kernel, topo, sample_configuration(law, rngs.back()).x);
  }
  const PilotResult pilot = run_pilot(sims[0], rngs[0], observables, pilot_events, opt.rho_high, opt.rho_low);
  // rho(1) = exp(-0.23) ~ 0.8 for the pilot rate.
  const double dt = 0.23 / pilot.lambda;

  std::vector<ChainResult> results(R);
  auto work = [&](int r) {
    if (r > 0) {
      // Burn-in of matching length for the extra replicas.
      for (std::uint64_t e = 0; e < pilot_events; ++e) sims[r].fire(rngs[r]);
    }
    run_main(sims[r], rngs[r], observables, main_events, dt, opt.batches, opt.lags, results[r]);
  };
  if (R == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int r = 0; r < R; ++r) threads.emplace_back(work, r);
    for (auto& t : threads) t.join();
  }

  GapEstimateMC best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < observables.size(); ++o) {
    LagStats pooled(opt.lags);
    std::vector<const LagStats*> parts;
    for (auto& res : results)
      for (auto& b : res.batches) {
        pooled.merge(b[o]);
        parts.push_back(&b[o]);
      }
    std::vector<double> rho(opt.lags + 1);
    for (int k = 0; k <= opt.lags; ++k) rho[k] = pooled.rho(k);
    Fit fit = fit_window(rho, opt.rho_high, opt.rho_low);
    regress(rho, dt, fit);
    if (!fit.ok) continue;
    std::vector<double> lambdas;
    for (const LagStats* p : parts) {
      std::vector<double> rb(opt.lags + 1);
      for (int k = 0; k <= opt.lags; ++k) rb[k] = p->rho(k);
      Fit fb = fit;
      regress(rb, dt, fb);
      if (fb.ok) lambdas.push_back(fb.lambda);
    }
    if (lambdas.size() < 2) continue;
    double mean = 0.0;
    for (double l : lambdas) mean += l;
    mean /= lambdas.size();
    double var = 0.0;
    for (double l : lambdas) var += (l - mean) * (l - mean);
    var /= (lambdas.size() - 1);
    if (fit.lambda < best.value) {
      best.value = fit.lambda;
      best.stderr_ = std::sqrt(var / lambdas.size());
      best.observable = observables[o].id;
      best.window_first_lag = fit.first;
      best.window_last_lag = fit.last;
      best.r_squared = fit.r2;
      best.flagged = fit.r2 < 0.95 || lambdas.size() < parts.size();
      best.note = lambdas.size() < parts.size() ? "some batches had no valid fit" : "";
    }
  }
  best.sample_interval = dt;
  best.events = budget;
  if (!std::isfinite(best.value)) {
    best.value = pilot.lambda;
    best.stderr_ = pilot.lambda;
    best.flagged = true;
    best.note = "no observable produced a valid autocorrelation window; pilot rate reported";
  }
  return best;
}

double ks_statistic(std::vector<double>& data, const std::function<double(double)>& cdf) {
  std::sort(data.begin(), data.end());
  const double n = static_cast<double>(data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double f = cdf(data[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_critical_1pct(std::size_t n) {
  const double s = std::sqrt(static_cast<double>(n));
  return 1.6276 / (s + 0.12 + 0.11 / s);
}

EquilibriumReport equilibrium_check(const ExchangeKernel& kernel, const Topology& topo,
                                    const SimplexLaw& law, std::uint64_t budget, Rng& rng) {
  const int N = law.sites;
  Simulator sim(kernel, topo, sample_configuration(law, rng).x);
  const auto obs = default_observables(law);
  const std::uint64_t pilot_events = budget / 10;
  const PilotResult pilot = run_pilot(sim, rng, {obs[0]}, pilot_events, 0.8, 0.05);
  EquilibriumReport rep;
  rep.stride = 5.0 / pilot.lambda;
  const double total = law.total_energy();
  std::vector<double> values;
  double next = sim.time() + rep.stride;
  int site = 0;
  while (sim.events() < budget) {
    const double t = sim.next_event_time(rng);
    while (next < t) {
      values.push_back(sim.state()[site] / total);
      site = (site + 1) % N;
      next += rep.stride;
    }
    sim.fire(rng);
  }
  const double g = law.gamma.value();
  rep.samples = values.size();
  rep.ks_statistic = ks_statistic(values, [&](double v) { return beta_cdf(v, g, (N - 1) * g); });
  rep.critical_value = ks_critical_1pct(rep.samples);
  rep.pass = rep.samples > 0 && rep.ks_statistic < rep.critical_value;
  return rep;
}

}  // namespace gapforge
