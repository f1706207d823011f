#include "qpb/integer_matrix.hpp"

#include <string>

namespace qpb {

Rational parse_rational(const std::string& text) {
  try {
    return Rational(text);
  } catch (const std::exception&) {
    throw InputError("not a rational number: '" + text + "'");
  }
}

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

RatMatrix inverse(const RatMatrix& m) {
  using Eigen::Index;
  if (m.rows() != m.cols()) throw InputError("inverse of a non-square matrix");
  const Index n = m.rows();
  RatMatrix a = m;
  RatMatrix inv = RatMatrix::Identity(n, n);
  for (Index k = 0; k < n; ++k) {
    Index pivot = -1;
    for (Index i = k; i < n; ++i) {
      if (a(i, k) != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) throw InputError("matrix is singular");
    if (pivot != k) {
      a.row(k).swap(a.row(pivot));
      inv.row(k).swap(inv.row(pivot));
    }
    const Rational scale = Rational(1) / a(k, k);
    a.row(k) *= scale;
    inv.row(k) *= scale;
    for (Index i = 0; i < n; ++i) {
      if (i == k || a(i, k) == 0) continue;
      const Rational f = a(i, k);
      a.row(i) -= f * a.row(k);
      inv.row(i) -= f * inv.row(k);
    }
  }
  return inv;
}

IntMatrix integer_kernel(const IntMatrix& m) {
  const auto snf = smith_normal_form<Integer>(m);
  const Eigen::Index r = snf.rank();
  const Eigen::Index n = m.cols();
  return snf.v.rightCols(n - r).transpose();
}

IntMatrix row_basis(const IntMatrix& generators) {
  if (generators.rows() == 0) return IntMatrix(0, generators.cols());
  const auto snf = smith_normal_form<Integer>(generators);
  const Eigen::Index r = snf.rank();
  // rowspace(m) = rowspace(d * v^{-1})
  const RatMatrix v_inv = inverse(to_rational(snf.v));
  IntMatrix out(r, generators.cols());
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < generators.cols(); ++j)
      out(i, j) = snf.d(i, i) * mp::numerator(v_inv(i, j));
  return out;
}

IntMatrix saturation(const IntMatrix& basis) {
  if (basis.rows() == 0) return basis;
  const auto snf = smith_normal_form<Integer>(basis);
  const Eigen::Index r = snf.rank();
  const RatMatrix v_inv = inverse(to_rational(snf.v));
  IntMatrix out(r, basis.cols());
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < basis.cols(); ++j) out(i, j) = mp::numerator(v_inv(i, j));
  return out;
}

bool is_primitive(const IntMatrix& basis) {
  if (basis.rows() == 0) return true;
  const auto snf = smith_normal_form<Integer>(basis);
  if (snf.rank() != basis.rows()) return false;
  for (Eigen::Index i = 0; i < basis.rows(); ++i)
    if (snf.d(i, i) != 1) return false;
  return true;
}

Inertia inertia(const RatMatrix& symmetric) {
  using Eigen::Index;
  RatMatrix a = symmetric;
  Index n = a.rows();
  Inertia result;
  // Congruence diagonalization; each step removes one row/column.
  while (n > 0) {
    Index pivot = -1;
    for (Index i = 0; i < n; ++i) {
      if (a(i, i) != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) {
      Index pi = -1, pj = -1;
      for (Index i = 0; i < n && pi < 0; ++i)
        for (Index j = i + 1; j < n; ++j)
          if (a(i, j) != 0) {
            pi = i;
            pj = j;
            break;
          }
      if (pi < 0) {
        result.zero += static_cast<int>(n);
        break;
      }
      // e_i -> e_i + e_j makes the diagonal entry 2 a(i,j) nonzero.
      a.row(pi) += a.row(pj);
      a.col(pi) += a.col(pj);
      pivot = pi;
    }
    if (pivot != n - 1) {
      a.row(pivot).swap(a.row(n - 1));
      a.col(pivot).swap(a.col(n - 1));
    }
    const Rational p = a(n - 1, n - 1);
    if (p > 0) ++result.positive;
    else ++result.negative;
    for (Index i = 0; i < n - 1; ++i) {
      if (a(i, n - 1) == 0) continue;
      const Rational f = a(i, n - 1) / p;
      a.row(i).head(n) -= f * a.row(n - 1).head(n);
      a.col(i).head(n) -= f * a.col(n - 1).head(n);
    }
    --n;
  }
  return result;
}

RatVector solve_row_combination(const IntMatrix& basis, const RatVector& target) {
  const RatMatrix b = to_rational(basis);
  const RatMatrix gram = b * b.transpose();
  const RatVector rhs = b * target;
  const RatVector x = inverse(gram) * rhs;
  if (RatVector(b.transpose() * x) != target) throw InputError("vector is not in the row span");
  return x;
}

}  // namespace qpb
