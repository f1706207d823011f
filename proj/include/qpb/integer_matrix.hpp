#pragma once

#include <algorithm>
#include <utility>

#include "qpb/types.hpp"

namespace qpb {

/// Smith normal form u * m * v = d with u, v unimodular and d diagonal,
/// d(i,i) >= 0 and d(i,i) | d(i+1,i+1). Works for any exact integer scalar.
template <typename Scalar>
struct SmithForm {
  Matrix<Scalar> u;
  Matrix<Scalar> d;
  Matrix<Scalar> v;

  Eigen::Index rank() const {
    Eigen::Index r = 0;
    while (r < std::min(d.rows(), d.cols()) && d(r, r) != 0) ++r;
    return r;
  }
};

namespace detail {
template <typename Scalar>
Scalar abs_value(const Scalar& x) {
  return x < 0 ? Scalar(-x) : x;
}
}  // namespace detail

template <typename Scalar>
SmithForm<Scalar> smith_normal_form(Matrix<Scalar> m) {
  using Eigen::Index;
  const Index rows = m.rows();
  const Index cols = m.cols();
  Matrix<Scalar> u = Matrix<Scalar>::Identity(rows, rows);
  Matrix<Scalar> v = Matrix<Scalar>::Identity(cols, cols);

  for (Index t = 0; t < std::min(rows, cols); ++t) {
    bool finished = false;
    for (;;) {
      Index pi = -1, pj = -1;
      for (Index i = t; i < rows; ++i) {
        for (Index j = t; j < cols; ++j) {
          if (m(i, j) == 0) continue;
          if (pi < 0 || detail::abs_value(m(i, j)) < detail::abs_value(m(pi, pj))) {
            pi = i;
            pj = j;
          }
        }
      }
      if (pi < 0) {
        finished = true;
        break;
      }
      if (pi != t) {
        m.row(t).swap(m.row(pi));
        u.row(t).swap(u.row(pi));
      }
      if (pj != t) {
        m.col(t).swap(m.col(pj));
        v.col(t).swap(v.col(pj));
      }

      bool clean = true;
      for (Index i = t + 1; i < rows; ++i) {
        const Scalar q = m(i, t) / m(t, t);
        if (q != 0) {
          m.row(i) -= q * m.row(t);
          u.row(i) -= q * u.row(t);
        }
        if (m(i, t) != 0) clean = false;
      }
      for (Index j = t + 1; j < cols; ++j) {
        const Scalar q = m(t, j) / m(t, t);
        if (q != 0) {
          m.col(j) -= q * m.col(t);
          v.col(j) -= q * v.col(t);
        }
        if (m(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      Index bad = -1;
      for (Index i = t + 1; i < rows && bad < 0; ++i) {
        for (Index j = t + 1; j < cols; ++j) {
          if (m(i, j) % m(t, t) != 0) {
            bad = i;
            break;
          }
        }
      }
      if (bad < 0) break;
      m.row(t) += m.row(bad);
      u.row(t) += u.row(bad);
    }
    if (finished) break;
    if (m(t, t) < 0) {
      m.row(t) *= Scalar(-1);
      u.row(t) *= Scalar(-1);
    }
  }
  return {std::move(u), std::move(m), std::move(v)};
}

/// Fraction-free (Bareiss) determinant.
template <typename Scalar>
Scalar determinant(Matrix<Scalar> m) {
  using Eigen::Index;
  const Index n = m.rows();
  if (n == 0) return Scalar(1);
  Scalar sign(1);
  Scalar prev(1);
  for (Index k = 0; k < n - 1; ++k) {
    if (m(k, k) == 0) {
      Index swap_row = -1;
      for (Index i = k + 1; i < n; ++i) {
        if (m(i, k) != 0) {
          swap_row = i;
          break;
        }
      }
      if (swap_row < 0) return Scalar(0);
      m.row(k).swap(m.row(swap_row));
      sign = -sign;
    }
    for (Index i = k + 1; i < n; ++i) {
      for (Index j = k + 1; j < n; ++j) {
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
      }
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

RatMatrix to_rational(const IntMatrix& m);

/// Exact inverse over Q; throws InputError when singular.
RatMatrix inverse(const RatMatrix& m);

/// Rows form a Z-basis of {x in Z^n : m x = 0}; the result is saturated.
IntMatrix integer_kernel(const IntMatrix& m);

/// Z-basis (as rows) of the row span of `generators`.
IntMatrix row_basis(const IntMatrix& generators);

/// Z-basis (as rows) of Q-span(rows) intersected with Z^n.
IntMatrix saturation(const IntMatrix& basis);

/// True when the rows span a primitive sublattice (all elementary divisors are 1).
bool is_primitive(const IntMatrix& basis);

/// (positive, negative, zero) eigenvalue counts of a symmetric matrix, exact.
struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};
Inertia inertia(const RatMatrix& symmetric);

/// Solves x * basis = target for integer x when target lies in the row span.
/// `basis` must have full row rank.
RatVector solve_row_combination(const IntMatrix& basis, const RatVector& target);

}  // namespace qpb
