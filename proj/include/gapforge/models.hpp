#pragma once

/**
 * @file models.hpp
 * @brief Exchange kernels: a rate Lambda(a, b) and a redistribution law
 * P(a, b, d alpha) for the pair update x_i <- alpha s, x_j <- (1 - alpha) s.
 *
 * Every kernel here has mechanical form Lambda(a, b) = (a + b)^m Lambda_r(beta)
 * with beta = a / (a + b) and a redistribution density that depends on beta
 * only, so the kernel is described by (m, Lambda_r, P(beta, alpha)) together
 * with the shape gamma of the reversible Gamma law.
 */

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gapforge/measures.hpp"
#include "gapforge/rng.hpp"

namespace gapforge {

struct PairUpdate {
  int i = 0;  // receives alpha * s (0-based site index)
  int j = 1;  // receives (1 - alpha) * s
  double alpha = 0.5;
};

// Applies the update in place. The larger share is computed by
// multiplication and the smaller one by an exact subtraction, so
// x_i + x_j == s holds bitwise.
void apply_update(std::vector<double>& x, const PairUpdate& u);
EnergyConfiguration apply_update(const EnergyConfiguration& x, const PairUpdate& u);

enum class KernelKind { Star, Gg3, Gg2, Stick };

struct MechanicalForm {
  double m;              // Lambda_s(s) = s^m
  GammaShape gamma_rev;  // shape of the reversible product-Gamma law
};

class ExchangeKernel {
 public:
  KernelKind kind() const { return kind_; }
  // Identifier accepted by make_kernel ("star", "kmp", "gg2", "gg3", "stick").
  const std::string& id() const { return id_; }
  const std::optional<MechanicalForm>& mechanical() const { return mechanical_; }
  double m() const { return mechanical_->m; }
  double gamma() const { return mechanical_->gamma_rev.value(); }
  // False for negative-m star kernels, which only serve the upper-bound check.
  bool certified() const { return certified_; }

  double rate(double a, double b) const;
  double alpha_density(double a, double b, double alpha) const;
  double sample_alpha(double a, double b, Rng& rng) const;

  double reduced_rate(double beta) const;                   // Lambda_r
  double reduced_density(double beta, double alpha) const;  // P(beta, alpha)

  /**
   * q(beta, alpha) = w(beta) Lambda_r(beta) P(beta, alpha) with w the
   * Beta(gamma, gamma) density. Reversibility is the symmetry of q.
   */
  double symmetric_weight(double beta, double alpha) const;

  // Points in (0,1) where P(beta, .) has a kink, a branch change or an
  // integrable singularity; quadrature splits there.
  std::vector<double> breakpoints(double beta) const;

  friend ExchangeKernel star_kernel(double m, GammaShape gamma);
  friend ExchangeKernel kmp_kernel();
  friend ExchangeKernel gg3_kernel(double m);
  friend ExchangeKernel gg2_kernel(double m);
  friend ExchangeKernel stick_kernel(double m);

 private:
  ExchangeKernel(KernelKind kind, std::string id, double m, double gamma);

  double gg2_tilde(double beta, double alpha) const;

  KernelKind kind_;
  std::string id_;
  std::optional<MechanicalForm> mechanical_;
  bool certified_ = true;
};

// Rate (a + b)^m, alpha ~ Beta(gamma, gamma). m < 0 is accepted but marked
// non-certified.
ExchangeKernel star_kernel(double m, GammaShape gamma);
// Star kernel with m = 0, gamma = 1: unit rate, uniform redistribution.
ExchangeKernel kmp_kernel();
// Rare-collision limit of the three-dimensional billiard lattice; reversible
// for gamma = 3/2. The physical rate exponent is 1/2.
ExchangeKernel gg3_kernel(double m = 0.5);
// Two-dimensional billiard lattice; reversible for gamma = 1.
ExchangeKernel gg2_kernel(double m = 0.5);
// Stick process: P(beta, alpha) = m |beta - alpha|^(m-1) / Lambda_r(beta),
// Lambda_r(beta) = beta^m + (1 - beta)^m, reversible for gamma = 1.
ExchangeKernel stick_kernel(double m);

// Kernel lookup by identifier. `gamma` is used by "star" only; the other
// kernels fix their reversible shape and reject a conflicting value.
ExchangeKernel make_kernel(std::string_view id, double m, double gamma);

}  // namespace gapforge
