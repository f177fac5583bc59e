#pragma once

// Small dense linear algebra: exact rational elimination (null spaces,
// LDL^T) and a cyclic Jacobi eigensolver in extended precision.

#include "bilap/polyalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bilap {

using Real = long double;
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Rational to long double, keeping more bits than mpq_get_d alone.
inline Real to_real(const Rational& q) {
  const double hi = q.get_d();
  if (!std::isfinite(hi)) return static_cast<Real>(hi);
  const Rational rem = q - Rational(hi);
  return static_cast<Real>(hi) + static_cast<Real>(rem.get_d());
}

struct ExactMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> data;

  ExactMatrix() = default;
  ExactMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  static ExactMatrix identity(std::size_t n) {
    ExactMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  Rational& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  RealMatrix to_real() const {
    RealMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = bilap::to_real((*this)(i, j));
    return out;
  }

  ExactMatrix transpose() const {
    ExactMatrix t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("ExactMatrix: shape mismatch");
    ExactMatrix c(a.rows, b.cols);
    Rational t;
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t k = 0; k < a.cols; ++k) {
        const Rational& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols; ++j) {
          if (b(k, j) == 0) continue;
          t = aik * b(k, j);
          c(i, j) += t;
        }
      }
    return c;
  }
};

/// Columns spanning {x : C x = 0}, from the reduced row echelon form of C.
/// Each column has a unit entry at one free variable and zeros at the others.
inline ExactMatrix null_space(ExactMatrix c) {
  const std::size_t m = c.rows;
  const std::size_t n = c.cols;
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    std::size_t piv = row;
    while (piv < m && c(piv, col) == 0) ++piv;
    if (piv == m) continue;
    if (piv != row)
      for (std::size_t j = 0; j < n; ++j) std::swap(c(piv, j), c(row, j));
    const Rational inv = 1 / c(row, col);
    for (std::size_t j = col; j < n; ++j) c(row, j) *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row || c(i, col) == 0) continue;
      const Rational f = c(i, col);
      for (std::size_t j = col; j < n; ++j)
        if (c(row, j) != 0) c(i, j) -= f * c(row, j);
    }
    pivot_cols.push_back(col);
    ++row;
  }
  std::vector<bool> is_pivot(n, false);
  for (auto p : pivot_cols) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t j = 0; j < n; ++j)
    if (!is_pivot[j]) free_cols.push_back(j);

  ExactMatrix basis(n, free_cols.size());
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    basis(free_cols[f], f) = 1;
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) basis(pivot_cols[r], f) = -c(r, free_cols[f]);
  }
  return basis;
}

/// Exact S = L D L^T for a symmetric positive definite S (L unit lower).
struct ExactLdlt {
  ExactMatrix lower;
  std::vector<Rational> diag;
};

inline ExactLdlt ldlt(const ExactMatrix& s) {
  const std::size_t n = s.rows;
  ExactLdlt f{ExactMatrix::identity(n), std::vector<Rational>(n)};
  Rational t;
  for (std::size_t j = 0; j < n; ++j) {
    Rational d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) {
      if (f.lower(j, k) == 0) continue;
      t = f.lower(j, k) * f.lower(j, k);
      t *= f.diag[k];
      d -= t;
    }
    if (d <= 0) throw std::domain_error("ldlt: matrix is not positive definite");
    f.diag[j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      Rational v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) {
        if (f.lower(i, k) == 0 || f.lower(j, k) == 0) continue;
        t = f.lower(i, k) * f.lower(j, k);
        t *= f.diag[k];
        v -= t;
      }
      f.lower(i, j) = v / d;
    }
  }
  return f;
}

/// L^{-1} X for unit lower-triangular L.
inline ExactMatrix forward_substitute(const ExactMatrix& lower, ExactMatrix x) {
  Rational t;
  for (std::size_t j = 0; j < x.cols; ++j)
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t k = 0; k < i; ++k) {
        if (lower(i, k) == 0 || x(k, j) == 0) continue;
        t = lower(i, k) * x(k, j);
        x(i, j) -= t;
      }
  return x;
}

/// L^{-1} S L^{-T} for symmetric S.
inline ExactMatrix congruence_inverse(const ExactMatrix& lower, const ExactMatrix& s) {
  const ExactMatrix half = forward_substitute(lower, s);
  return forward_substitute(lower, half.transpose());
}

// ---------------------------------------------------------------------------

struct SymmetricEigen {
  RealVector values;   // ascending
  RealMatrix vectors;  // columns
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// tol * ||A||_F. Output is sorted ascending; the order of rotations is fixed
/// so results are reproducible bit for bit.
inline SymmetricEigen jacobi_eigen(RealMatrix a, Real tol = 1e-13L, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  RealMatrix v = RealMatrix::Identity(n, n);
  const Real norm = a.norm();
  int sweep = 0;
  auto off = [&]() {
    Real s = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  while (norm > 0 && off() > tol * norm) {
    if (++sweep > max_sweeps) throw std::runtime_error("jacobi_eigen: no convergence");
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Real apq = a(p, q);
        if (apq == 0) continue;
        const Real theta = (a(q, q) - a(p, p)) / (2 * apq);
        const Real t = (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const Real c = 1 / std::sqrt(t * t + 1);
        const Real s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Real akp = a(k, p);
          const Real akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Real apk = a(p, k);
          const Real aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0;
        a(q, p) = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Real vkp = v(k, p);
          const Real vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  out.sweeps = sweep;
  return out;
}

}  // namespace bilap
