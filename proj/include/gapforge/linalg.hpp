#pragma once

/**
 * @file linalg.hpp
 * @brief Small dense symmetric linear algebra: Cholesky, cyclic Jacobi
 * eigensolver, and Sturm-sequence bisection for symmetric tridiagonals.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "gapforge/errors.hpp"

namespace gapforge {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  // Leading k x k principal block.
  Matrix leading(std::size_t k) const {
    Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Matrix<T> multiply(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      if (aik == T(0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class T>
Matrix<T> transpose(const Matrix<T>& a) {
  Matrix<T> t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

// C^T M C
template <class T>
Matrix<T> congruence(const Matrix<T>& m, const Matrix<T>& c) {
  return multiply(transpose(c), multiply(m, c));
}

template <class T>
T max_asymmetry(const Matrix<T>& a) {
  T worst = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst;
}

// Lower-triangular L with L L^T = a. Throws NumericalError when a is not
// numerically positive definite.
template <class T>
Matrix<T> cholesky(const Matrix<T>& a) {
  const std::size_t n = a.rows();
  Matrix<T> l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    T d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > T(0))) throw NumericalError("cholesky: matrix is not positive definite");
    const T ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      T s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

// Solves L y = b in place (L lower triangular).
template <class T>
void forward_substitute(const Matrix<T>& l, std::span<T> b) {
  for (std::size_t i = 0; i < l.rows(); ++i) {
    T s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
    b[i] = s / l(i, i);
  }
}

// Solves L^T x = b in place.
template <class T>
void backward_substitute_transposed(const Matrix<T>& l, std::span<T> b) {
  const std::size_t n = l.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    T s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * b[k];
    b[ii] = s / l(ii, ii);
  }
}

template <class T>
struct SymmetricEigen {
  std::vector<T> values;  // ascending
  Matrix<T> vectors;      // column k pairs with values[k]
  int sweeps = 0;
};

/**
 * Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
 * tol times the Frobenius norm of the input. The input is symmetrized
 * first, and tol is floored at 8 n machine epsilons, the rounding level of
 * one sweep. Eigenvalues are sorted ascending together with their
 * eigenvector columns.
 */
template <class T>
SymmetricEigen<T> jacobi_eigen(Matrix<T> a, T tol, int max_sweeps = 100) {
  const std::size_t n = a.rows();
  Matrix<T> v = Matrix<T>::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = (a(i, j) + a(j, i)) / 2;
  tol = std::max(tol, T(8) * T(n) * std::numeric_limits<T>::epsilon());
  T total = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) total += a(i, j) * a(i, j);
  const T target = tol * std::sqrt(total);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    T off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= target) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = a(p, q);
        if (apq == T(0)) continue;
        const T theta = (a(q, q) - a(p, p)) / (2 * apq);
        const T t = (theta >= 0 ? T(1) : T(-1)) /
                    (std::abs(theta) + std::sqrt(theta * theta + 1));
        const T c = 1 / std::sqrt(t * t + 1);
        const T s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps) throw NumericalError("jacobi_eigen: no convergence");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen<T> out;
  out.values.resize(n);
  out.vectors = Matrix<T>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  out.sweeps = sweep;
  return out;
}

// Number of eigenvalues strictly below x of the symmetric tridiagonal matrix
// with the given diagonal and off-diagonal (off.size() == diag.size() - 1).
template <class T>
int sturm_count(std::span<const T> diag, std::span<const T> off, T x) {
  int count = 0;
  T q = diag[0] - x;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    if (q == T(0)) q = std::numeric_limits<T>::epsilon() * (std::abs(x) + 1);
    q = diag[i] - x - off[i - 1] * off[i - 1] / q;
    if (q < 0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue (k = 0 ... n-1) by bisection on the Sturm count,
// bracketed by Gershgorin discs.
template <class T>
T tridiagonal_eigenvalue(std::span<const T> diag, std::span<const T> off, int k,
                         T abs_tol) {
  const std::size_t n = diag.size();
  T lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    T r = 0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  for (int it = 0; it < 400 && hi - lo > abs_tol; ++it) {
    const T mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(diag, off, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return lo + (hi - lo) / 2;
}

template <class T>
T tridiagonal_max_eigenvalue(std::span<const T> diag, std::span<const T> off,
                             T abs_tol) {
  return tridiagonal_eigenvalue(diag, off, static_cast<int>(diag.size()) - 1, abs_tol);
}

}  // namespace gapforge
