#include "gapforge/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gapforge/errors.hpp"
#include "gapforge/special.hpp"

namespace gapforge {

namespace {

constexpr double kPi = std::numbers::pi;

// sqrt(2 / pi^3), the prefactor of the two-dimensional billiard density.
const double kGg2Prefactor = std::sqrt(2.0 / (kPi * kPi * kPi));

double clamp_modulus(double t) { return std::min(t, std::nextafter(1.0, 0.0)); }

}  // namespace

void apply_update(std::vector<double>& x, const PairUpdate& u) {
  const double s = x[u.i] + x[u.j];
  if (u.alpha >= 0.5) {
    const double big = u.alpha * s;
    x[u.i] = big;
    x[u.j] = s - big;
  } else {
    const double big = (1.0 - u.alpha) * s;
    x[u.j] = big;
    x[u.i] = s - big;
  }
}

EnergyConfiguration apply_update(const EnergyConfiguration& x, const PairUpdate& u) {
  const int n = static_cast<int>(x.x.size());
  if (u.i == u.j || u.i < 0 || u.j < 0 || u.i >= n || u.j >= n)
    throw ConfigError("apply_update: invalid site indices");
  if (!(u.alpha >= 0.0 && u.alpha <= 1.0)) throw ConfigError("apply_update: alpha outside [0,1]");
  EnergyConfiguration y = x;
  apply_update(y.x, u);
  return y;
}

ExchangeKernel::ExchangeKernel(KernelKind kind, std::string id, double m, double gamma)
    : kind_(kind), id_(std::move(id)), mechanical_(MechanicalForm{m, GammaShape(gamma)}) {}

ExchangeKernel star_kernel(double m, GammaShape gamma) {
  if (!std::isfinite(m)) throw ConfigError("star_kernel: m must be finite");
  ExchangeKernel k(KernelKind::Star, "star", m, gamma.value());
  k.certified_ = m >= 0.0;
  return k;
}

ExchangeKernel kmp_kernel() { return ExchangeKernel(KernelKind::Star, "kmp", 0.0, 1.0); }

ExchangeKernel gg3_kernel(double m) {
  if (!(m >= 0.0)) throw ConfigError("gg3_kernel: m must be nonnegative");
  return ExchangeKernel(KernelKind::Gg3, "gg3", m, 1.5);
}

ExchangeKernel gg2_kernel(double m) {
  if (!(m >= 0.0)) throw ConfigError("gg2_kernel: m must be nonnegative");
  return ExchangeKernel(KernelKind::Gg2, "gg2", m, 1.0);
}

ExchangeKernel stick_kernel(double m) {
  if (!(m > 0.0)) throw ConfigError("stick_kernel: m must be positive");
  return ExchangeKernel(KernelKind::Stick, "stick", m, 1.0);
}

ExchangeKernel make_kernel(std::string_view id, double m, double gamma) {
  auto fixed_gamma = [&](double expected) {
    if (std::abs(gamma - expected) > 1e-15)
      throw ConfigError("kernel '" + std::string(id) + "' is reversible only for gamma = " +
                        std::to_string(expected));
  };
  if (id == "star") return star_kernel(m, GammaShape(gamma));
  if (id == "kmp") {
    if (m != 0.0) throw ConfigError("kernel 'kmp' has m = 0");
    fixed_gamma(1.0);
    return kmp_kernel();
  }
  if (id == "gg3") {
    fixed_gamma(1.5);
    return gg3_kernel(m);
  }
  if (id == "gg2") {
    fixed_gamma(1.0);
    return gg2_kernel(m);
  }
  if (id == "stick") {
    fixed_gamma(1.0);
    return stick_kernel(m);
  }
  throw ConfigError("unknown kernel '" + std::string(id) + "'");
}

double ExchangeKernel::reduced_rate(double beta) const {
  const double big = std::max(beta, 1.0 - beta);
  switch (kind_) {
    case KernelKind::Star:
      return 1.0;
    case KernelKind::Gg3:
      return std::sqrt(2.0 * kPi) / 6.0 * (0.5 + big) / std::sqrt(big);
    case KernelKind::Gg2: {
      const double small = std::min(beta, 1.0 - beta);
      // E and K take the parameter t, i.e. modulus sqrt(t); only then does
      // P(beta, .) integrate to one.
      const double t = small / big;
      const double k = std::sqrt(t);
      const double tail = t < 1.0 ? (1.0 - t) * elliptic_k(k) : 0.0;
      return std::sqrt(8.0 * big / (kPi * kPi * kPi)) * (2.0 * elliptic_e(k) - tail);
    }
    case KernelKind::Stick:
      return std::pow(beta, m()) + std::pow(1.0 - beta, m());
  }
  return 0.0;
}

double ExchangeKernel::gg2_tilde(double b, double a) const {
  // Four branches; the only singularity is the logarithmic one of K at
  // alpha = 1 - beta.
  double v;
  const double lo = std::min(b, 1.0 - b), hi = std::max(b, 1.0 - b);
  if (a <= lo)
    v = std::sqrt(1.0 / (1.0 - b)) * elliptic_k(clamp_modulus(std::sqrt(a / (1.0 - b))));
  else if (a >= hi)
    v = std::sqrt(1.0 / b) * elliptic_k(clamp_modulus(std::sqrt((1.0 - a) / b)));
  else if (b <= a)  // b <= a <= 1 - b
    v = std::sqrt(1.0 / (1.0 - a)) * elliptic_k(clamp_modulus(std::sqrt(b / (1.0 - a))));
  else  // 1 - b <= a <= b
    v = std::sqrt(1.0 / a) * elliptic_k(clamp_modulus(std::sqrt((1.0 - b) / a)));
  return kGg2Prefactor * v;
}

double ExchangeKernel::reduced_density(double beta, double alpha) const {
  if (alpha < 0.0 || alpha > 1.0) return 0.0;
  switch (kind_) {
    case KernelKind::Star:
      return beta_pdf(alpha, gamma(), gamma());
    case KernelKind::Gg3: {
      const double ma = std::min(alpha, 1.0 - alpha);
      const double mb = std::min(beta, 1.0 - beta);
      const double big = 1.0 - mb;
      const double ratio = mb > 0.0 ? std::min(1.0, std::sqrt(ma / mb)) : 1.0;
      return 1.5 * ratio / (0.5 + big);
    }
    case KernelKind::Gg2:
      if (alpha == 1.0 - beta) return HUGE_VAL;
      return gg2_tilde(beta, alpha) / reduced_rate(beta);
    case KernelKind::Stick: {
      const double d = std::abs(beta - alpha);
      if (d == 0.0 && m() < 1.0) return HUGE_VAL;
      return m() * std::pow(d, m() - 1.0) / reduced_rate(beta);
    }
  }
  return 0.0;
}

double ExchangeKernel::symmetric_weight(double beta, double alpha) const {
  switch (kind_) {
    case KernelKind::Star:
      return beta_pdf(beta, gamma(), gamma()) * beta_pdf(alpha, gamma(), gamma());
    case KernelKind::Gg3: {
      // w_{3/2}(beta) Lambda_r(beta) P(beta, alpha) collapses to
      // 2 sqrt(2/pi) min(sqrt(m_alpha), sqrt(m_beta)).
      const double ma = std::min(alpha, 1.0 - alpha);
      const double mb = std::min(beta, 1.0 - beta);
      return 2.0 * std::sqrt(2.0 / kPi) * std::sqrt(std::min(ma, mb));
    }
    case KernelKind::Gg2:
      if (alpha == 1.0 - beta) return HUGE_VAL;
      return gg2_tilde(beta, alpha);
    case KernelKind::Stick: {
      const double d = std::abs(beta - alpha);
      if (d == 0.0 && m() < 1.0) return HUGE_VAL;
      return m() * std::pow(d, m() - 1.0);
    }
  }
  return 0.0;
}

std::vector<double> ExchangeKernel::breakpoints(double beta) const {
  std::vector<double> pts;
  switch (kind_) {
    case KernelKind::Star:
      break;
    case KernelKind::Gg3:
    case KernelKind::Gg2:
      pts = {beta, 1.0 - beta, 0.5};
      break;
    case KernelKind::Stick:
      pts = {beta};
      break;
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::erase_if(pts, [](double p) { return !(p > 0.0 && p < 1.0); });
  return pts;
}

double ExchangeKernel::rate(double a, double b) const {
  const double s = a + b;
  if (!(s > 0.0)) return 0.0;
  const double m_ = m();
  const double scale = m_ == 0.0 ? 1.0 : (m_ == 1.0 ? s : std::pow(s, m_));
  if (kind_ == KernelKind::Star) return scale;
  return scale * reduced_rate(a / s);
}

double ExchangeKernel::alpha_density(double a, double b, double alpha) const {
  return reduced_density(a / (a + b), alpha);
}

double ExchangeKernel::sample_alpha(double a, double b, Rng& rng) const {
  const double beta = a / (a + b);
  switch (kind_) {
    case KernelKind::Star:
      if (gamma() == 1.0) return uniform_open(rng);
      return sample_beta(gamma(), gamma(), rng);
    case KernelKind::Gg3: {
      // Uniform proposal; the acceptance ratio against the bound
      // 1.5 / (1/2 + max(beta, 1-beta)) is min(1, sqrt(m_alpha / m_beta)).
      const double mb = std::min(beta, 1.0 - beta);
      for (;;) {
        const double alpha = uniform_open(rng);
        const double ma = std::min(alpha, 1.0 - alpha);
        if (ma >= mb || uniform01(rng) < std::sqrt(ma / mb)) return alpha;
      }
    }
    case KernelKind::Gg2: {
      // Envelope c |alpha - a*|^(-1/2), a* = 1 - beta, c = 1/sqrt(2 pi),
      // from K(k) <= (pi/2) (1 - k^2)^(-1/4).
      const double star = 1.0 - beta;
      const double left = std::sqrt(star), right = std::sqrt(1.0 - star);
      const double c = 1.0 / std::sqrt(2.0 * kPi);
      for (;;) {
        const bool go_left = uniform01(rng) * (left + right) < left;
        const double span = go_left ? star : 1.0 - star;
        const double u = uniform_open(rng);
        const double d = span * u * u;
        const double alpha = go_left ? star - d : star + d;
        if (!(alpha > 0.0 && alpha < 1.0) || alpha == star) continue;
        const double envelope = c / std::sqrt(std::abs(alpha - star));
        if (uniform01(rng) * envelope < gg2_tilde(beta, alpha)) return alpha;
      }
    }
    case KernelKind::Stick: {
      // Side chosen with probability beta^m / Lambda_r, then the distance
      // d = L U^(1/m) inverts the CDF (d / L)^m.
      const double mm = m();
      const double wl = std::pow(beta, mm), wr = std::pow(1.0 - beta, mm);
      for (;;) {
        const bool go_left = uniform01(rng) * (wl + wr) < wl;
        const double span = go_left ? beta : 1.0 - beta;
        const double d = span * std::pow(uniform_open(rng), 1.0 / mm);
        const double alpha = go_left ? beta - d : beta + d;
        if (alpha > 0.0 && alpha < 1.0) return alpha;
      }
    }
  }
  return 0.5;
}

}  // namespace gapforge
