// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gapforge/appendix.hpp"
#include "gapforge/bounds.hpp"
#include "gapforge/galerkin.hpp"
#include "gapforge/quadrature.hpp"
#include "gapforge/simulate.hpp"
#include "oracles.hpp"

using namespace gapforge;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, const char* fmt, ...) __attribute__((format(printf, 2, 3)));
void note(Outcome& o, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += buf;
}

double gap(const ExchangeKernel& k, TopologyKind kind, double E, int N, int d) {
  return galerkin_gap(k, Topology(kind, N), SimplexLaw(GammaShape(k.gamma()), E, N), d).value;
}

Outcome exact_m0() {
  Outcome o;
  double worst = 0.0;
  for (double g : {0.5, 1.0, 1.5, 2.0})
    for (int N = 2; N <= 6; ++N) {
      const double exact = (g * N + 1.0) / (N * (2.0 * g + 1.0));
      worst = std::max(worst, std::abs(gap(star_kernel(0.0, GammaShape(g)), TopologyKind::LongRange, 1.0, N, 3) - exact));
    }
  o.pass = worst <= 1e-8;
  note(o, "max |gap - (gN+1)/(N(2g+1))| = %.3g over 20 cases", worst);
  return o;
}

Outcome two_site_identity() {
  Outcome o;
  double worst = 0.0;
  for (double m : {0.0, 0.5, 1.0, 2.0})
    for (double E : {0.5, 1.0, 2.0}) {
      const double v = gap(star_kernel(m, GammaShape(1.0)), TopologyKind::NearestNeighbor, E, 2, default_degree(2));
      const double ref = std::pow(2.0 * E, m);
      worst = std::max(worst, std::abs(v - ref) / ref);
    }
  o.pass = worst <= 1e-6;
  note(o, "max relative defect %.3g over 12 cases", worst);
  return o;
}

Outcome scaling() {
  Outcome o;
  double worst = 0.0;
  for (double m : {0.0, 0.5, 1.0, 2.0})
    for (int N : {2, 3, 4}) {
      const auto k = star_kernel(m, GammaShape(1.0));
      const double base = gap(k, TopologyKind::NearestNeighbor, 1.0, N, 3);
      for (double E : {0.5, 2.0}) {
        const double v = gap(k, TopologyKind::NearestNeighbor, E, N, 3);
        worst = std::max(worst, std::abs(v - std::pow(E, m) * base) / (std::pow(E, m) * base));
      }
    }
  o.pass = worst <= 1e-10;
  note(o, "max relative defect %.3g (m in {0,0.5,1,2}, E in {0.5,2} against E = 1, N in {2,3,4})", worst);
  return o;
}

Outcome kappa_tilde_bracket() {
  Outcome o;
  for (double g : {0.4, 2.0 / 3.0, 1.0, 1.5, 2.0, 3.0}) {
    const auto b = kappa_tilde_1_bracket(GammaShape(g), 200, 8, QForm::Consistent);
    const bool ok = b.lower > 1.0 / 3.0 && b.lower <= b.upper && b.width() < 5e-3;
    o.pass = o.pass && ok;
    KappaBracket printed;
    try {
      printed = kappa_tilde_1_bracket(GammaShape(g), 200, 8, QForm::Printed);
    } catch (const BracketInversionError& e) {
      printed = e.bracket;
    }
    note(o, "g=%.4g consistent q: [%.5f, %.5f]; printed q: lower %.5f vs upper %.5f%s", g, b.lower,
         b.upper, printed.lower, printed.upper, printed.lower > printed.upper ? " (inverted)" : "");
  }
  return o;
}

Outcome constants() {
  Outcome o;
  double nu_err = 0.0, p_err = 0.0, qp_err = 0.0, qc_err = 0.0, nu1 = 0.0, p23 = 0.0;
  for (double g : {0.5, 1.0, 1.5}) {
    const GammaShape gamma(g);
    const auto rule = gauss_jacobi_beta(g, g, 40);
    for (int n = 1; n <= 10; ++n) {
      double moment = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) moment += rule.weights[k] * std::pow(rule.nodes[k], n);
      nu_err = std::max(nu_err, std::abs(nu_n(gamma, n) - (n % 2 ? -moment : moment)));
      const auto q = constants_by_quadrature(gamma, n);
      p_err = std::max(p_err, std::abs(p_n(gamma, n) - q.p));
      qp_err = std::max(qp_err, std::abs(q_n(gamma, n, QForm::Printed) - q.q));
      qc_err = std::max(qc_err, std::abs(q_n(gamma, n, QForm::Consistent) - q.q));
    }
    nu1 = std::max(nu1, std::abs(nu_n(gamma, 1) + 0.5));
  }
  for (int n = 1; n <= 200; ++n) p23 = std::max(p23, std::abs(p_n(GammaShape(2.0 / 3.0), n) - 0.5));
  o.pass = nu_err <= 1e-8 && p_err <= 1e-8 && qp_err <= 1e-8 && nu1 <= 1e-12 && p23 <= 1e-12;
  note(o, "nu_n %.2g, p_n %.2g, printed q_n %.2g, consistent q_n %.2g (max abs diff to quadrature)", nu_err,
       p_err, qp_err, qc_err);
  note(o, "|nu_1 + 1/2| %.2g, max |p_n(2/3) - 1/2| %.2g", nu1, p23);
  return o;
}

Outcome propositions() {
  Outcome o;
  double worst_max = 0.0, worst_limit = 0.0, worst_raw = 0.0;
  for (double g : {1.0 / 3.0, 0.4, 2.0 / 3.0, 1.0, 1.5, 2.0, 3.0})
    for (auto verify : {verify_prop_a, verify_prop_b}) {
      const auto r = verify(GammaShape(g), 200, QForm::Printed);
      o.pass = o.pass && r.pass() && std::abs(r.limit_estimate - 0.5) <= 1e-2;
      worst_max = std::max({worst_max, r.max_value, r.tail_bound});
      worst_limit = std::max(worst_limit, std::abs(r.limit_estimate - 0.5));
      worst_raw = std::max(worst_raw, std::abs(r.limit_raw - 0.5));
    }
  note(o, "largest certificate value (incl. tail bound) %.6f", worst_max);
  note(o, "limit estimate within %.2e of 1/2 (raw value at n = 200 within %.3f)", worst_limit, worst_raw);
  return o;
}

Outcome lemmas() {
  Outcome o;
  const auto checks = verify_monotonicity_lemmas({0.2, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0, 2.0, 3.0}, 1, 50);
  const auto bad = std::count_if(checks.begin(), checks.end(), [](const LemmaCheck& c) { return !c.pass; });
  o.pass = bad == 0 && !checks.empty();
  note(o, "%zu instances, %td violations", checks.size(), bad);
  return o;
}

Outcome section_constants() {
  Outcome o;
  const auto gg2 = two_site_constant(gg2_kernel());
  const auto gg3 = two_site_constant(gg3_kernel());
  const auto s1 = two_site_constant(stick_kernel(1.0));
  o.pass = gg2.value >= 0.39894 && gg3.value > 0.0 && gg3.plateau() <= 1e-4 && std::abs(s1.value - 1.0) <= 1e-6;
  note(o, "C_GG2 %.6f, C_GG3 %.6f (plateau %.1e), stick m=1 %.9f", gg2.value, gg3.value, gg3.plateau(),
       s1.value);
  for (double m : {2.0, 3.0}) {
    const double v = two_site_constant(stick_kernel(m)).value;
    const double a = (m - 1.0) / (4.0 * m);
    const double bound = std::pow(a, m - 1.0) * (1.0 - 4.0 * a);
    o.pass = o.pass && v >= bound;
    note(o, "stick m=%g %.5f >= %.5f", m, v, bound);
  }
  return o;
}

Outcome harness(const std::vector<TheoremCheck>& suite) {
  Outcome o;
  int counted = 0, verified = 0;
  auto take = [&](const TheoremCheck& c) {
    ++counted;
    verified += c.status == CheckStatus::Verified;
    if (!c.pass()) {
      o.pass = false;
      note(o, "violated: %s %s", c.claim.c_str(), c.model.c_str());
    }
  };
  double min_main = 1e300, min_margin = 1e300;
  for (const auto& c : suite) {
    if (c.claim == "convex-comparison" || c.claim == "m-to-2m" || c.claim == "m-to-2m-hypothesis" ||
        c.claim == "mechanical-comparison") {
      take(c);
      // Positive margin is required outside the two-site identity case.
      if (c.direction != Direction::Equal) {
        min_margin = std::min(min_margin, c.margin());
        if (!(c.margin() > 0.0)) o.pass = false;
      }
    } else if (c.claim == "main-constant" || c.claim == "compare-constant") {
      take(c);
      if (c.claim == "main-constant") min_main = std::min(min_main, c.lhs);
    }
  }
  o.pass = o.pass && counted > 0;
  note(o, "%d checks (%d verified, rest consistent), min inequality margin %.3g, min main constant %.3g",
       counted, verified, min_margin, min_main);
  return o;
}

Outcome monte_carlo() {
  Outcome o;
  struct Case {
    ExchangeKernel k;
    TopologyKind kind;
    int N;
  };
  const std::vector<Case> cases = {
      {star_kernel(0.0, GammaShape(1.0)), TopologyKind::NearestNeighbor, 2},
      {star_kernel(0.0, GammaShape(1.0)), TopologyKind::NearestNeighbor, 3},
      {star_kernel(0.0, GammaShape(1.0)), TopologyKind::LongRange, 2},
      {star_kernel(0.0, GammaShape(1.0)), TopologyKind::LongRange, 3},
      {stick_kernel(1.0), TopologyKind::NearestNeighbor, 3},
  };
  std::uint64_t idx = 0;
  for (const auto& c : cases) {
    const SimplexLaw law(GammaShape(1.0), 1.0, c.N);
    const Topology topo(c.kind, c.N);
    const auto g = galerkin_gap(c.k, topo, law, 6);
    const double plateau = std::abs(g.history[5] - g.history[4]);
    const auto mc = estimate_gap_autocorr(c.k, topo, law, {galerkin_observable(g, law)}, 10000000,
                                          derive_seed(2024, idx++));
    const double z = std::abs(mc.value - g.value) / mc.stderr_;
    const bool ok = !mc.flagged && std::abs(mc.value - g.value) <= 3.0 * mc.stderr_ + plateau;
    o.pass = o.pass && ok;
    note(o, "%s %s N=%d: mc %.5f +- %.5f vs galerkin %.5f (change %.1e), z=%.2f", c.k.id().c_str(),
         topo.name().c_str(), c.N, mc.value, mc.stderr_, g.value, plateau, z);
  }
  return o;
}

Outcome kernel_validity() {
  Outcome o;
  const std::vector<ExchangeKernel> kernels = {star_kernel(0.5, GammaShape(0.5)), star_kernel(1.0, GammaShape(2.0)),
                                               kmp_kernel(), stick_kernel(0.5), stick_kernel(1.0),
                                               stick_kernel(2.0), gg3_kernel(), gg2_kernel()};
  for (const auto& k : kernels) {
    auto flux = [&](double b, double a) {
      return oracle::beta_pdf(b, k.gamma(), k.gamma()) * k.reduced_rate(b) * k.reduced_density(b, a);
    };
    double balance = 0.0, norm = 0.0;
    for (int i = 1; i < 50; ++i)
      for (int j = 1; j < 50; ++j) {
        const double b = (i + 0.37) / 51.0, a = (j + 0.61) / 51.0;
        if (std::abs(a - b) < 1e-3 || std::abs(a + b - 1.0) < 1e-3) continue;
        const double f = flux(b, a), r = flux(a, b);
        balance = std::max(balance, std::abs(f - r) / std::max(std::abs(f), std::abs(r)));
      }
    for (int i = 1; i < 20; ++i) {
      const double b = (i + 0.13) / 20.5;
      const double total =
          oracle::integrate_unit([&](double a) { return k.reduced_density(b, a); }, {b, 1.0 - b, 0.5});
      norm = std::max(norm, std::abs(total - 1.0));
    }
    o.pass = o.pass && balance < 1e-8 && norm <= 1e-6;
    note(o, "%s(m=%g): balance %.1e, norm %.1e", k.id().c_str(), k.m(), balance, norm);
  }
  return o;
}

Outcome moving_path() {
  Outcome o;
  int bad = 0;
  for (int j = 2; j <= 21; ++j)
    for (int i = 1; i < j; ++i) {
      const auto p = build_moving_path(i, j);
      const auto label = oracle::compose_swaps(j, p.swaps());
      for (int s = 1; s <= j; ++s) bad += label[s] != (s == i ? j : (s == j ? i : s));
      for (auto [a, b] : p.swaps()) bad += std::abs(a - b) < 1 || std::abs(a - b) > 2;
      bad += !moving_path_violations(p).empty();
    }
  const auto p13 = build_moving_path(1, 3);
  const bool seq = p13.sites == std::vector<int>{1, 2, 3, 1, 2, 3};
  o.pass = bad == 0 && seq;
  note(o, "210 pairs, %d defects; (1,3) -> %s", bad, seq ? "1,2,3,1,2,3" : "unexpected sequence");
  return o;
}

Outcome negative_m() {
  Outcome o;
  const auto c = check_negative_m_remark(-1.0, 16);
  o.pass = c.pass();
  note(o, "quotient %.5f vs 2^-m N^m = %.5f (%s)", c.lhs, c.rhs, c.note.c_str());
  return o;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  TheoremSuiteOptions so;
  so.include_moving_lemma = false;
  const auto suite = run_theorem_suite(so);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact m=0 long-range gap", exact_m0},
      {"two-site identity", two_site_identity},
      {"scaling in E", scaling},
      {"kappa~_1 > 1/3 bracket", kappa_tilde_bracket},
      {"appendix constants vs quadrature", constants},
      {"certificate propositions A/B", propositions},
      {"monotonicity lemmas", lemmas},
      {"two-site constants", section_constants},
      {"inequality harness", [&] { return harness(suite); }},
      {"Monte Carlo vs Galerkin", monte_carlo},
      {"kernel validity", kernel_validity},
      {"moving path", moving_path},
      {"negative-m remark", negative_m},
  };
  int failed = 0, index = 1;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", index++, name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of %zu criteria failed (%.0fs)\n", failed, criteria.size(), total);
  return failed == 0 ? 0 : 1;
}
