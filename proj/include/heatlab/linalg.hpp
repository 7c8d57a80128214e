#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "heatlab/errors.hpp"
#include "heatlab/precision.hpp"

namespace heatlab {

/// Dense row-major matrix. Sizes here are tiny (N <= 128) but the scalars are
/// multiprecision, so nothing is vectorised.
template <class Real>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Real(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Real& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Real& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<Real> column(std::size_t j) const {
    std::vector<Real> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  template <class Other>
  Matrix<Other> cast() const {
    Matrix<Other> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = static_cast<Other>((*this)(i, j));
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

template <class Real>
Matrix<Real> operator*(const Matrix<Real>& a, const Matrix<Real>& b) {
  Matrix<Real> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Real aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class Real>
std::vector<Real> operator*(const Matrix<Real>& a, const std::vector<Real>& x) {
  std::vector<Real> y(a.rows(), Real(0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Real s = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

template <class Real>
Real dot(const std::vector<Real>& a, const std::vector<Real>& b) {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// x^T A x
template <class Real>
Real quadratic_form(const Matrix<Real>& a, const std::vector<Real>& x) {
  return dot(x, a * x);
}

template <class Real>
Real max_abs_entry(const Matrix<Real>& a) {
  using std::abs;
  Real m = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, Real(abs(a(i, j))));
  return m;
}

template <class Real>
struct EigenDecomposition {
  std::vector<Real> values;  // ascending
  Matrix<Real> vectors;      // column k belongs to values[k]
  int sweeps = 0;
};

/// Cyclic two-sided Jacobi for a symmetric matrix.
///
/// Rotations are skipped once |a_ij| <= tol * sqrt(|a_ii a_jj|). That relative
/// test is what lets Jacobi resolve the small eigenvalues of strongly graded
/// positive definite matrices (the final-state Gramians span thousands of
/// orders of magnitude) to nearly full relative accuracy.
template <class Real>
EigenDecomposition<Real> symmetric_eigen(Matrix<Real> a, int max_sweeps = 80) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = a.rows();
  if (a.cols() != n) fail(ErrorKind::kInvalidArgument, "symmetric_eigen needs a square matrix");
  Matrix<Real> v = Matrix<Real>::identity(n);
  using std::ldexp;
  const Real tol = ldexp(Real(1), -static_cast<int>(precision_bits<Real>()) + 4);

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Real apq = a(p, q);
        if (apq == 0) continue;
        const Real app = a(p, p);
        const Real aqq = a(q, q);
        if (abs(apq) <= tol * sqrt(abs(app * aqq))) {
          a(p, q) = 0;
          a(q, p) = 0;
          continue;
        }
        rotated = true;
        const Real theta = (aqq - app) / (2 * apq);
        const Real sign = theta < 0 ? Real(-1) : Real(1);
        const Real t = sign / (abs(theta) + sqrt(theta * theta + 1));
        const Real c = 1 / sqrt(t * t + 1);
        const Real s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Real akp = a(k, p);
          const Real akq = a(k, q);
          const Real nkp = c * akp - s * akq;
          const Real nkq = s * akp + c * akq;
          a(k, p) = nkp;
          a(p, k) = nkp;
          a(k, q) = nkq;
          a(q, k) = nkq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0;
        a(q, p) = 0;
        for (std::size_t k = 0; k < n; ++k) {
          const Real vkp = v(k, p);
          const Real vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    if (!rotated) break;
  }
  if (sweep == max_sweeps) {
    fail(ErrorKind::kPrecisionExhausted,
         "Jacobi did not converge in " + std::to_string(max_sweeps) + " sweeps at " +
             std::to_string(precision_bits<Real>()) + " bits");
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition<Real> out;
  out.values.resize(n);
  out.vectors = Matrix<Real>(n, n);
  out.sweeps = sweep + 1;
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// Gaussian elimination with complete pivoting, P A Q = L U.
template <class Real>
class FullPivotLU {
 public:
  explicit FullPivotLU(Matrix<Real> a) : lu_(std::move(a)) {
    using std::abs;
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) fail(ErrorKind::kInvalidArgument, "FullPivotLU needs a square matrix");
    row_perm_.resize(n);
    col_perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) row_perm_[i] = col_perm_[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
      std::size_t pr = k;
      std::size_t pc = k;
      Real best = 0;
      for (std::size_t i = k; i < n; ++i)
        for (std::size_t j = k; j < n; ++j)
          if (abs(lu_(i, j)) > best) {
            best = abs(lu_(i, j));
            pr = i;
            pc = j;
          }
      if (best == 0) {
        rank_ = k;
        return;
      }
      if (k == 0) max_pivot_ = best;
      min_pivot_ = best;
      if (pr != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(pr, j));
        std::swap(row_perm_[k], row_perm_[pr]);
      }
      if (pc != k) {
        for (std::size_t i = 0; i < n; ++i) std::swap(lu_(i, k), lu_(i, pc));
        std::swap(col_perm_[k], col_perm_[pc]);
      }
      const Real pivot = lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i) {
        const Real factor = lu_(i, k) / pivot;
        lu_(i, k) = factor;
        if (factor == 0) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
      }
    }
    rank_ = n;
  }

  std::size_t size() const { return lu_.rows(); }
  std::size_t rank() const { return rank_; }
  bool singular() const { return rank_ < size(); }

  /// min |pivot| / max |pivot|; a cheap lower bound on 1/condition.
  Real pivot_ratio() const {
    if (singular() || max_pivot_ == 0) return Real(0);
    return min_pivot_ / max_pivot_;
  }

  std::vector<Real> solve(const std::vector<Real>& b) const {
    if (singular()) fail(ErrorKind::kInvalidArgument, "solve with a singular factorisation");
    const std::size_t n = size();
    std::vector<Real> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      Real s = b[row_perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
      y[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      Real s = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * y[j];
      y[ii] = s / lu_(ii, ii);
    }
    std::vector<Real> x(n);
    for (std::size_t i = 0; i < n; ++i) x[col_perm_[i]] = y[i];
    return x;
  }

  Matrix<Real> inverse() const {
    const std::size_t n = size();
    Matrix<Real> inv(n, n);
    std::vector<Real> e(n, Real(0));
    for (std::size_t j = 0; j < n; ++j) {
      e[j] = 1;
      const auto col = solve(e);
      for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
      e[j] = 0;
    }
    return inv;
  }

 private:
  Matrix<Real> lu_;
  std::vector<std::size_t> row_perm_;
  std::vector<std::size_t> col_perm_;
  std::size_t rank_ = 0;
  Real max_pivot_ = 0;
  Real min_pivot_ = 0;
};

/// Infinity-norm condition number of the Cauchy matrix 1/(x_i + y_j), from its
/// closed-form inverse.
template <class Real>
Real cauchy_condition(const std::vector<Real>& x, const std::vector<Real>& y) {
  using std::abs;
  const std::size_t n = x.size();
  Matrix<Real> c(n, n);
  Matrix<Real> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c(i, j) = 1 / (x[i] + y[j]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Real num = 1;
      for (std::size_t k = 0; k < n; ++k) num *= (x[j] + y[k]) * (x[k] + y[i]);
      Real den = x[j] + y[i];
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) den *= x[j] - x[k];
        if (k != i) den *= y[i] - y[k];
      }
      inv(i, j) = num / den;
    }
  }
  auto norm_inf = [n](const Matrix<Real>& m) {
    Real best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Real row = 0;
      for (std::size_t j = 0; j < n; ++j) row += abs(m(i, j));
      best = std::max(best, row);
    }
    return best;
  };
  return norm_inf(c) * norm_inf(inv);
}

}  // namespace heatlab
