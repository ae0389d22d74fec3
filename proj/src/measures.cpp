#include "gapforge/measures.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gapforge/errors.hpp"
#include "gapforge/special.hpp"

namespace gapforge {

GammaShape::GammaShape(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ConfigError("gamma must be a positive finite number");
}

SimplexLaw::SimplexLaw(GammaShape g, double e, int n) : gamma(g), mean_energy(e), sites(n) {
  if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("mean energy must be positive");
  if (n < 1) throw ConfigError("number of sites must be at least 1");
}

double EnergyConfiguration::total() const {
  long double s = 0.0L;
  for (double v : x) s += v;
  return static_cast<double>(s);
}

void EnergyConfiguration::validate() const {
  if (x.empty()) throw ConfigError("configuration has no sites");
  for (double v : x)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("energies must be positive");
  const double target = mean_energy * static_cast<double>(x.size());
  if (std::abs(total() - target) > 1e-12 * target)
    throw ConfigError("configuration total " + std::to_string(total()) +
                      " does not match N E = " + std::to_string(target));
}

int MultiIndex::degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

EnergyConfiguration sample_configuration(const SimplexLaw& law, Rng& rng) {
  EnergyConfiguration c;
  c.mean_energy = law.mean_energy;
  c.x.resize(law.sites);
  if (law.sites == 1) {
    c.x[0] = law.mean_energy;
    return c;
  }
  long double sum = 0.0L;
  for (double& v : c.x) {
    v = sample_gamma(law.gamma.value(), rng);
    sum += v;
  }
  const long double scale = law.total_energy() / sum;
  for (double& v : c.x) v = static_cast<double>(v * scale);
  return c;
}

double dirichlet_moment(GammaShape gamma, int N, const MultiIndex& k) {
  if (static_cast<int>(k.exponents.size()) != N)
    throw ConfigError("dirichlet_moment: multi-index length must equal N");
  const long double g = gamma.value();
  long double lg = log_gamma(N * g);
  int total = 0;
  for (int e : k.exponents) {
    if (e < 0) throw ConfigError("dirichlet_moment: negative exponent");
    if (e == 0) continue;
    lg += log_gamma(g + e) - log_gamma(g);
    total += e;
  }
  lg -= log_gamma(N * g + total);
  return static_cast<double>(std::exp(lg));
}

long double dirichlet_moment_general(std::span<const long double> shapes,
                                     std::span<const long double> exponents) {
  long double shape_sum = 0.0L, exp_sum = 0.0L, lg = 0.0L;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const long double a = shapes[i], e = exponents[i];
    if (!(a + e > 0.0L)) throw ConfigError("dirichlet_moment_general: moment diverges");
    shape_sum += a;
    exp_sum += e;
    if (e != 0.0L) lg += log_gamma(a + e) - log_gamma(a);
  }
  lg += log_gamma(shape_sum) - log_gamma(shape_sum + exp_sum);
  return std::exp(lg);
}

double pair_alpha_moment(GammaShape gamma, int p, int q) {
  if (p < 0 || q < 0) throw ConfigError("pair_alpha_moment: negative exponent");
  const long double g = gamma.value();
  return static_cast<double>(std::exp(log_beta(g + p, g + q) - log_beta(g, g)));
}

double marginal_moment(GammaShape gamma, int N, int p) {
  if (N < 2) throw ConfigError("marginal_moment: N must be at least 2");
  MultiIndex k{std::vector<int>(N, 0)};
  k.exponents[0] = p;
  return dirichlet_moment(gamma, N, k);
}

}  // namespace gapforge
