#include "gapforge/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gapforge/errors.hpp"
#include "gapforge/quadrature.hpp"
#include "gapforge/special.hpp"

namespace gapforge {

namespace {

using LD = long double;

void enumerate_degree(int vars, int deg, std::vector<int>& cur, int pos,
                      std::vector<MultiIndex>& out, int N) {
  if (pos == vars - 1) {
    cur[pos] = deg;
    MultiIndex k;
    k.exponents.assign(N, 0);
    std::copy(cur.begin(), cur.end(), k.exponents.begin());
    out.push_back(std::move(k));
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[pos] = e;
    enumerate_degree(vars, deg - e, cur, pos + 1, out, N);
  }
}

LD log_pair_moment(LD g, LD p, LD q) { return log_beta(g + p, g + q) - log_beta(g, g); }

long double binomial(int n, int k) {
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Monomial coefficients of phi_{u,v}(t) = t^u (1-t)^v, indexed by power.
std::vector<LD> pair_poly(int u, int v) {
  std::vector<LD> c(u + v + 1, 0.0L);
  for (int r = 0; r <= v; ++r) c[u + r] = binomial(v, r) * ((r % 2) ? -1.0L : 1.0L);
  return c;
}

// Converts a monomial-level form M(k, l) = Q(t^k, t^l), k, l <= d, to the
// pair-function level.
Matrix<LD> to_pair_level(const Matrix<LD>& mono, int d) {
  const int P = (d + 1) * (d + 2) / 2;
  Matrix<LD> q(P, P);
  std::vector<std::vector<LD>> polys(P);
  for (int deg = 0; deg <= d; ++deg)
    for (int v = 0; v <= deg; ++v) polys[PairForms::index(deg - v, v)] = pair_poly(deg - v, v);
  for (int a = 0; a < P; ++a)
    for (int b = a; b < P; ++b) {
      LD s = 0.0L;
      for (std::size_t k = 0; k < polys[a].size(); ++k) {
        if (polys[a][k] == 0.0L) continue;
        for (std::size_t l = 0; l < polys[b].size(); ++l)
          s += polys[a][k] * polys[b][l] * mono(k, l);
      }
      q(a, b) = q(b, a) = s;
    }
  return q;
}

PairForms star_pair_forms(const ExchangeKernel& kernel, int d) {
  const LD g = kernel.gamma();
  const int P = (d + 1) * (d + 2) / 2;
  PairForms out;
  out.degree = d;
  out.method = "exact";
  out.q = Matrix<LD>(P, P);
  for (int da = 0; da <= d; ++da)
    for (int va = 0; va <= da; ++va)
      for (int db = 0; db <= d; ++db)
        for (int vb = 0; vb <= db; ++vb) {
          const int ua = da - va, ub = db - vb;
          // 2 (E[phi psi] - E[phi] E[psi]) for alpha, beta iid Beta(gamma, gamma).
          const LD joint = std::exp(log_pair_moment(g, ua + ub, va + vb));
          const LD mean = std::exp(log_pair_moment(g, ua, va) + log_pair_moment(g, ub, vb));
          out.q(PairForms::index(ua, va), PairForms::index(ub, vb)) = 2.0L * (joint - mean);
        }
  return out;
}

PairForms stick_pair_forms(const ExchangeKernel& kernel, int d) {
  const LD m = kernel.m();
  // I(a, b) = int int |beta - alpha|^(m-1) alpha^a beta^b.
  auto I = [&](int a, int b) {
    return (std::exp(log_beta(m, b + 1.0L)) + std::exp(log_beta(m, a + 1.0L))) / (a + b + m + 1.0L);
  };
  Matrix<LD> mono(d + 1, d + 1);
  for (int k = 0; k <= d; ++k)
    for (int l = 0; l <= d; ++l)
      mono(k, l) = m * (I(k + l, 0) - I(k, l) - I(l, k) + I(0, k + l));
  PairForms out;
  out.degree = d;
  out.method = "exact";
  out.q = to_pair_level(mono, d);
  return out;
}

// Mom(a, b) = int int q(beta, alpha) alpha^a beta^b for a <= 2d, b <= d at
// one tanh-sinh level.
Matrix<LD> quadrature_moments(const ExchangeKernel& kernel, int d, int level) {
  const int A = 2 * d + 1;
  Matrix<LD> mom(A, d + 1);
  std::vector<LD> g(A), apow(A);
  const double outer[3] = {0.0, 0.5, 1.0};
  for (int piece = 0; piece < 2; ++piece) {
    tanh_sinh_nodes(outer[piece], outer[piece + 1], level, [&](double beta, double wb) {
      std::fill(g.begin(), g.end(), 0.0L);
      std::vector<double> br{0.0};
      for (double p : kernel.breakpoints(beta)) br.push_back(p);
      br.push_back(1.0);
      for (std::size_t p = 0; p + 1 < br.size(); ++p) {
        if (!(br[p + 1] > br[p])) continue;
        tanh_sinh_nodes(br[p], br[p + 1], level, [&](double alpha, double wa) {
          const LD val = static_cast<LD>(wa) * kernel.symmetric_weight(beta, alpha);
          LD pw = 1.0L;
          for (int a = 0; a < A; ++a, pw *= alpha) g[a] += val * pw;
        });
      }
      LD bp = static_cast<LD>(wb);
      for (int b = 0; b <= d; ++b, bp *= beta)
        for (int a = 0; a < A; ++a) mom(a, b) += bp * g[a];
    });
  }
  return mom;
}

Matrix<LD> monomial_forms_from_moments(const Matrix<LD>& mom, int d) {
  // By symmetry of q: Q(t^k, t^l) = 2 [Mom(k+l, 0) - Mom(k, l)].
  Matrix<LD> mono(d + 1, d + 1);
  for (int k = 0; k <= d; ++k)
    for (int l = 0; l <= d; ++l) mono(k, l) = 2.0L * (mom(k + l, 0) - mom(k, l));
  return mono;
}

PairForms quadrature_pair_forms(const ExchangeKernel& kernel, int d, const AssemblyOptions& opt) {
  const Matrix<LD> coarse = monomial_forms_from_moments(
      quadrature_moments(kernel, d, opt.quadrature_level), d);
  const Matrix<LD> fine = monomial_forms_from_moments(
      quadrature_moments(kernel, d, opt.quadrature_level + 1), d);
  double err = 0.0;
  for (int k = 0; k <= d; ++k)
    for (int l = 0; l <= d; ++l)
      err = std::max(err, static_cast<double>(std::abs(fine(k, l) - coarse(k, l))));
  if (err > opt.quadrature_tolerance)
    throw NumericalError("pair-form quadrature did not converge: node-doubling change " +
                         std::to_string(err));
  PairForms out;
  out.degree = d;
  out.method = "quadrature";
  out.error = err;
  out.q = to_pair_level(fine, d);
  return out;
}

// Monomial coefficients of the orthonormal polynomials of Beta(a, b), up to
// degree d: coef[n][k].
std::vector<std::vector<LD>> orthonormal_coefficients(double a, double b, int d) {
  BetaOrthonormal family(a, b, d + 1);
  const auto& diag = family.diagonal();
  const auto& off = family.off_diagonal();
  std::vector<std::vector<LD>> c(d + 1, std::vector<LD>(d + 1, 0.0L));
  c[0][0] = 1.0L;
  for (int n = 0; n < d; ++n) {
    // p_{n+1} = ((x - a_n) p_n - b_{n-1} p_{n-1}) / b_n
    for (int k = 0; k <= n; ++k) {
      c[n + 1][k + 1] += c[n][k];
      c[n + 1][k] -= diag[n] * c[n][k];
      if (n > 0) c[n + 1][k] -= off[n - 1] * c[n - 1][k];
    }
    for (int k = 0; k <= n + 1; ++k) c[n + 1][k] /= off[n];
  }
  return c;
}

LD smallest_eigenvalue(const Matrix<LD>& g, const Matrix<LD>& a, Matrix<LD>* vec_out,
                       Matrix<LD>* chol_out) {
  const std::size_t n = g.rows();
  const Matrix<LD> l = cholesky(g);
  // C = L^{-1} A L^{-T}
  Matrix<LD> x(n, n);
  std::vector<LD> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
    forward_substitute(l, std::span<LD>(col));
    for (std::size_t i = 0; i < n; ++i) x(i, j) = col[i];
  }
  Matrix<LD> c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) col[j] = x(i, j);
    forward_substitute(l, std::span<LD>(col));
    for (std::size_t j = 0; j < n; ++j) c(i, j) = col[j];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) c(i, j) = c(j, i) = 0.5L * (c(i, j) + c(j, i));
  auto eig = jacobi_eigen(c, 1e-17L);
  if (vec_out) *vec_out = eig.vectors;
  if (chol_out) *chol_out = l;
  return eig.values[0];
}

}  // namespace

int PairForms::index(int u, int v) {
  const int deg = u + v;
  return deg * (deg + 1) / 2 + v;
}

std::size_t PolynomialBasis::count_up_to(int d) const {
  return static_cast<std::size_t>(
      std::count_if(indices.begin(), indices.end(), [&](const MultiIndex& k) { return k.degree() <= d; }));
}

PolynomialBasis build_basis(int N, int d) {
  if (N < 2) throw ConfigError("build_basis: N must be at least 2");
  if (d < 1) throw ConfigError("build_basis: degree must be at least 1");
  PolynomialBasis basis;
  basis.N = N;
  basis.degree = d;
  const int vars = N - 1;
  std::vector<int> cur(vars, 0);
  for (int deg = 0; deg <= d; ++deg) enumerate_degree(vars, deg, cur, 0, basis.indices, N);
  return basis;
}

PairForms pair_forms(const ExchangeKernel& kernel, int d, const AssemblyOptions& options) {
  switch (kernel.kind()) {
    case KernelKind::Star:
      return star_pair_forms(kernel, d);
    case KernelKind::Stick:
      return stick_pair_forms(kernel, d);
    case KernelKind::Gg2:
    case KernelKind::Gg3:
      return quadrature_pair_forms(kernel, d, options);
  }
  throw NumericalError("pair_forms: unknown kernel");
}

QuadraticForms assemble(const ExchangeKernel& kernel, const Topology& topo, const SimplexLaw& law,
                        const PolynomialBasis& basis, const AssemblyOptions& options) {
  if (basis.N != law.sites || topo.N != law.sites)
    throw ConfigError("assemble: basis, topology and law disagree on N");
  if (!(kernel.gamma() == law.gamma.value()))
    throw ConfigError("assemble: law gamma differs from the kernel's reversible shape");
  const int N = law.sites;
  const std::size_t n = basis.size();
  const LD g = law.gamma.value();
  const LD m = kernel.m();
  const PairForms pf = pair_forms(kernel, basis.degree, options);

  Matrix<LD> gm(n, n), am(n, n);
  std::vector<LD> shapes(N, g), expo(N);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r; c < n; ++c) {
      for (int k = 0; k < N; ++k)
        expo[k] = basis.indices[r].exponents[k] + basis.indices[c].exponents[k];
      gm(r, c) = gm(c, r) = dirichlet_moment_general(shapes, expo);
    }

  std::vector<LD> mshapes(N - 1, g), mexpo(N - 1);
  mshapes[0] = 2.0L * g;
  const LD weight = topo.bond_weight();
  for (auto [i, j] : topo.bonds()) {
    for (std::size_t r = 0; r < n; ++r) {
      const auto& a = basis.indices[r].exponents;
      const int qa = PairForms::index(a[i], a[j]);
      if (a[i] + a[j] == 0) continue;
      for (std::size_t c = r; c < n; ++c) {
        const auto& b = basis.indices[c].exponents;
        if (b[i] + b[j] == 0) continue;
        const LD q = pf.q(qa, PairForms::index(b[i], b[j]));
        if (q == 0.0L) continue;
        mexpo[0] = m + a[i] + a[j] + b[i] + b[j];
        int p = 1;
        for (int k = 0; k < N; ++k)
          if (k != i && k != j) mexpo[p++] = a[k] + b[k];
        const LD v = 0.5L * weight * dirichlet_moment_general(mshapes, mexpo) * q;
        am(r, c) += v;
        if (c != r) am(c, r) += v;
      }
    }
  }

  QuadraticForms out;
  out.basis = basis;
  out.quadrature_error = pf.error;
  out.pair_form_method = pf.method;
  const LD total = law.total_energy();
  if (options.coordinates == Coordinates::Raw) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const LD deg = basis.indices[r].degree() + basis.indices[c].degree();
        gm(r, c) *= std::pow(total, deg);
        am(r, c) *= std::pow(total, deg + m);
      }
    out.gap_scale = 1.0;
  } else {
    out.gap_scale = (m == 0.0L) ? 1.0 : static_cast<double>(std::pow(total, m));
  }

  Matrix<LD> cm = Matrix<LD>::identity(n);
  if (options.family == BasisFamily::Orthogonal) {
    const auto coef = orthonormal_coefficients(g, (N - 1) * g, basis.degree);
    std::map<std::vector<int>, std::size_t> position;
    for (std::size_t r = 0; r < n; ++r) position[basis.indices[r].exponents] = r;
    for (std::size_t c = 0; c < n; ++c) {
      const auto& a = basis.indices[c].exponents;
      for (std::size_t r = 0; r < n; ++r) {
        const auto& e = basis.indices[r].exponents;
        LD v = 1.0L;
        for (int k = 0; k < N - 1 && v != 0.0L; ++k) v *= e[k] <= a[k] ? coef[a[k]][e[k]] : 0.0L;
        cm(r, c) = v;
      }
    }
    out.gram = congruence(gm, cm);
    out.dirichlet = congruence(am, cm);
  } else {
    out.gram = gm;
    out.dirichlet = am;
  }
  if (options.coordinates == Coordinates::Raw) {
    // Express the coefficient map in w so the slowest mode is portable.
    for (std::size_t r = 0; r < n; ++r) {
      const LD s = std::pow(total, static_cast<LD>(basis.indices[r].degree()));
      for (std::size_t c = 0; c < n; ++c) cm(r, c) *= s;
    }
  }
  out.coefficients = cm;
  return out;
}

GapEstimateVar solve_gap(const QuadraticForms& forms) {
  const std::size_t n = forms.gram.rows();
  if (n < 2) throw ConfigError("solve_gap: basis has no nonconstant element");
  const auto& G = forms.gram;
  const auto& A = forms.dirichlet;
  const LD g00 = G(0, 0);
  const std::size_t k = n - 1;
  Matrix<LD> gd(k, k), ad(k, k);
  for (std::size_t r = 1; r < n; ++r)
    for (std::size_t c = 1; c < n; ++c) {
      gd(r - 1, c - 1) = G(r, c) - G(0, r) * G(0, c) / g00;
      ad(r - 1, c - 1) = A(r, c) - A(0, r) * G(0, c) / g00 - G(0, r) * A(0, c) / g00 +
                         G(0, r) * G(0, c) * A(0, 0) / (g00 * g00);
    }

  Matrix<LD> scaled(k, k);
  for (std::size_t r = 0; r < k; ++r) {
    if (!(gd(r, r) > 0.0L))
      throw BasisDegeneracyError("Gram matrix is singular after constant deflation; lower the degree");
    for (std::size_t c = 0; c < k; ++c) scaled(r, c) = gd(r, c) / std::sqrt(gd(r, r) * gd(c, c));
  }
  const auto ev = jacobi_eigen(scaled, 1e-17L);
  const LD cond = ev.values.front() > 0.0L ? ev.values.back() / ev.values.front()
                                           : std::numeric_limits<LD>::infinity();
  if (cond > 1e12L)
    throw BasisDegeneracyError("Gram matrix condition number " + std::to_string((double)cond) +
                               " exceeds 1e12; lower the degree or use the orthogonal basis");

  GapEstimateVar out;
  out.degree = forms.basis.degree;
  out.condition = static_cast<double>(cond);
  out.quadrature_error = forms.quadrature_error;
  out.method = "galerkin/" + forms.pair_form_method;
  for (int d = 1; d < forms.basis.degree; ++d) {
    const std::size_t kd = forms.basis.count_up_to(d) - 1;
    out.history.push_back(static_cast<double>(
        smallest_eigenvalue(gd.leading(kd), ad.leading(kd), nullptr, nullptr) * forms.gap_scale));
  }
  Matrix<LD> vecs, chol;
  const LD lam = smallest_eigenvalue(gd, ad, &vecs, &chol);
  out.value = static_cast<double>(lam * forms.gap_scale);
  out.history.push_back(out.value);

  std::vector<LD> v(k);
  for (std::size_t r = 0; r < k; ++r) v[r] = vecs(r, 0);
  backward_substitute_transposed(chol, std::span<LD>(v));
  std::vector<LD> full(n, 0.0L);
  for (std::size_t r = 1; r < n; ++r) {
    full[r] = v[r - 1];
    full[0] -= v[r - 1] * G(0, r) / g00;
  }
  out.monomials = forms.basis.indices;
  out.mode.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    LD s = 0.0L;
    for (std::size_t c = 0; c < n; ++c) s += forms.coefficients(r, c) * full[c];
    out.mode[r] = static_cast<double>(s);
  }
  return out;
}

double evaluate_mode(const GapEstimateVar& gap, const std::vector<double>& x, double total) {
  double s = 0.0;
  for (std::size_t r = 0; r < gap.monomials.size(); ++r) {
    double term = gap.mode[r];
    const auto& e = gap.monomials[r].exponents;
    for (std::size_t k = 0; k < e.size() && k < x.size(); ++k)
      for (int p = 0; p < e[k]; ++p) term *= x[k] / total;
    s += term;
  }
  return s;
}

int default_degree(int N) { return N <= 4 ? 4 : (N <= 6 ? 3 : 2); }

GapEstimateVar galerkin_gap(const ExchangeKernel& kernel, const Topology& topo,
                            const SimplexLaw& law, int degree, const AssemblyOptions& options) {
  return solve_gap(assemble(kernel, topo, law, build_basis(law.sites, degree), options));
}

KappaPair kappa(double m, GammaShape gamma, int d) {
  if (d < 2) throw ConfigError("kappa: degree must be at least 2");
  const ExchangeKernel kernel = star_kernel(m, gamma);
  const SimplexLaw law(gamma, 1.0 / 3.0, 3);
  KappaPair out;
  out.kappa = galerkin_gap(kernel, Topology(TopologyKind::NearestNeighbor, 3), law, d).value;
  out.kappa_tilde = galerkin_gap(kernel, Topology(TopologyKind::LongRange, 3), law, d).value;
  return out;
}

double TwoSiteConstant::plateau() const { return std::abs(value - half_resolution_value); }

namespace {

double two_site_at(const ExchangeKernel& kernel, int M) {
  const double g = kernel.gamma();
  const QuadratureRule rule = gauss_jacobi_beta(g, g, M);
  const BetaOrthonormal polys(g, g, M);
  std::vector<double> pk(M);
  // mom(i, k) = int q(beta_i, alpha) p_k(alpha) d alpha / w(beta_i)
  Matrix<LD> mom(M, M);
  for (int i = 0; i < M; ++i) {
    const double beta = rule.nodes[i];
    std::vector<double> br{0.0};
    for (double p : kernel.breakpoints(beta)) br.push_back(p);
    br.push_back(1.0);
    std::vector<LD> acc(M, 0.0L);
    constexpr int level = 8;
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
      if (!(br[p + 1] > br[p])) continue;
      tanh_sinh_nodes(br[p], br[p + 1], level, [&](double alpha, double wa) {
        const LD val = static_cast<LD>(wa) * kernel.symmetric_weight(beta, alpha);
        polys.evaluate(alpha, pk);
        for (int k = 0; k < M; ++k) acc[k] += val * pk[k];
      });
    }
    const LD w = beta_pdf(beta, g, g);
    for (int k = 0; k < M; ++k) mom(i, k) = acc[k] / w;
  }
  Matrix<LD> pj(M, M);  // pj(k, j) = p_k(beta_j)
  for (int j = 0; j < M; ++j) {
    polys.evaluate(rule.nodes[j], pk);
    for (int k = 0; k < M; ++k) pj(k, j) = pk[k];
  }
  Matrix<LD> s(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      LD omega = 0.0L;
      for (int k = 0; k < M; ++k) omega += pj(k, j) * mom(i, k);
      omega *= rule.weights[j];
      const LD h = (i == j ? mom(i, 0) : 0.0L) - omega;
      s(i, j) = std::sqrt(static_cast<LD>(rule.weights[i])) * h /
                std::sqrt(static_cast<LD>(rule.weights[j]));
    }
  // Symmetrize and push the constant direction u = sqrt(w) far up.
  LD top = 0.0L;
  for (int i = 0; i < M; ++i) top = std::max(top, std::abs(s(i, i)));
  const LD shift = 10.0L * (top + 1.0L);
  for (int i = 0; i < M; ++i)
    for (int j = i; j < M; ++j) {
      const LD sym = 0.5L * (s(i, j) + s(j, i)) +
                     shift * std::sqrt(static_cast<LD>(rule.weights[i]) * rule.weights[j]);
      s(i, j) = s(j, i) = sym;
    }
  return static_cast<double>(jacobi_eigen(s, 1e-16L).values[0]);
}

}  // namespace

TwoSiteConstant two_site_constant(const ExchangeKernel& kernel, int M) {
  if (M < 4) throw ConfigError("two_site_constant: resolution must be at least 4");
  if (!kernel.mechanical()) throw ConfigError("two_site_constant: kernel is not mechanical");
  TwoSiteConstant out;
  out.resolution = M;
  out.value = two_site_at(kernel, M);
  out.half_resolution_value = two_site_at(kernel, M / 2);
  return out;
}

}  // namespace gapforge
