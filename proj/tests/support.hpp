#pragma once

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "qpb/integer_matrix.hpp"
#include "qpb/lattice.hpp"
#include "qpb/qexp.hpp"

namespace qpb::testing {

inline IntMatrix unit_rows(Eigen::Index n, std::initializer_list<Eigen::Index> rows) {
  IntMatrix m = IntMatrix::Zero(static_cast<Eigen::Index>(rows.size()), n);
  Eigen::Index i = 0;
  for (auto r : rows) m(i++, r) = 1;
  return m;
}

// 1/Delta = q^-1 prod (1 - q^n)^-24 from the partition generating function raised to 24.
inline ScalarQSeries inverse_delta(int trunc) {
  const int len = trunc + 2;
  std::vector<Integer> p(len, 0);
  p[0] = 1;
  for (int part = 1; part < len; ++part)
    for (int n = part; n < len; ++n) p[n] += p[n - part];
  std::vector<Integer> acc(len, 0);
  acc[0] = 1;
  for (int r = 0; r < 24; ++r) {
    std::vector<Integer> next(len, 0);
    for (int a = 0; a < len; ++a)
      for (int b = 0; a + b < len; ++b) next[a + b] += acc[a] * p[b];
    acc = next;
  }
  ScalarQSeries s(1, trunc);
  for (int n = -1; n <= trunc; ++n) s.set(n, Rational(acc[n + 1]));
  return s;
}

// Random nondegenerate even lattice of the given rank with |det| <= max_det.
inline EvenLattice random_even_lattice(std::mt19937_64& rng, int rank, int max_det = 400) {
  std::uniform_int_distribution<int> off(-2, 2), diag(-3, 3);
  for (;;) {
    IntMatrix g(rank, rank);
    for (int i = 0; i < rank; ++i) {
      g(i, i) = 2 * diag(rng);
      for (int j = 0; j < i; ++j) g(i, j) = g(j, i) = off(rng);
    }
    const Integer det = determinant<Integer>(g);
    if (det == 0 || mp::abs(det) > max_det) continue;
    return EvenLattice(g);
  }
}

// Random positive definite even lattice, built as B B^T-style sums to stay definite.
inline EvenLattice random_positive_lattice(std::mt19937_64& rng, int rank, int max_det = 400) {
  std::uniform_int_distribution<int> off(-1, 1), diag(1, 3);
  for (;;) {
    IntMatrix g(rank, rank);
    for (int i = 0; i < rank; ++i) {
      g(i, i) = 2 * diag(rng);
      for (int j = 0; j < i; ++j) g(i, j) = g(j, i) = off(rng);
    }
    const Integer det = determinant<Integer>(g);
    if (det == 0 || mp::abs(det) > max_det) continue;
    const Inertia in = inertia(to_rational(g));
    if (in.positive != rank) continue;
    return EvenLattice(g);
  }
}

// Brute force: every v in coset + Z^n inside the box |v_i| <= sqrt(bound (G^-1)_ii),
// which contains the ellipsoid (v, v) <= bound.
inline std::vector<std::pair<std::vector<Rational>, Rational>> box_vectors(const EvenLattice& l, const RatVector& coset,
                                                                             const Rational& bound) {
  const Eigen::Index n = l.rank();
  const RatMatrix inv = inverse(l.rational_gram());
  std::vector<Integer> lo(n), hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = std::sqrt(to_double(bound * inv(i, i))) + 1e-9;
    lo[i] = Integer(static_cast<long long>(std::ceil(-r - to_double(coset(i)))));
    hi[i] = Integer(static_cast<long long>(std::floor(r - to_double(coset(i)))));
  }
  std::vector<std::pair<std::vector<Rational>, Rational>> out;
  std::vector<Integer> x = lo;
  for (Eigen::Index i = 0; i < n; ++i)
    if (lo[i] > hi[i]) return out;
  for (;;) {
    RatVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = coset(i) + Rational(x[i]);
    const Rational norm = l.pairing(v, v);
    if (norm <= bound) out.push_back({std::vector<Rational>(v.data(), v.data() + n), norm});
    Eigen::Index k = 0;
    while (k < n && x[k] == hi[k]) {
      x[k] = lo[k];
      ++k;
    }
    if (k == n) break;
    ++x[k];
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Norm counts of E8 in its coordinate model: vectors of Z^8 or (Z+1/2)^8 with even
// coordinate sum. Works with doubled coordinates; returns counts of (v,v) = 2m.
inline std::vector<long> e8_model_counts(int max_m) {
  std::vector<long> counts(max_m + 1, 0);
  const int r = static_cast<int>(std::floor(std::sqrt(2.0 * max_m))) + 1;
  for (int parity = 0; parity < 2; ++parity) {
    std::vector<int> y(8);
    std::vector<int> vals;
    for (int t = -2 * r; t <= 2 * r; ++t)
      if (((t % 2) + 2) % 2 == parity) vals.push_back(t);
    std::vector<std::size_t> idx(8, 0);
    for (;;) {
      long sq = 0;
      int sum = 0;
      for (int i = 0; i < 8; ++i) {
        sq += static_cast<long>(vals[idx[i]]) * vals[idx[i]];
        sum += vals[idx[i]];
      }
      // (v,v) = sq / 4, coordinate sum = sum / 2 must be an even integer
      if (sq % 8 == 0 && sq / 8 <= max_m && ((sum / 2) % 2 == 0) && sum % 2 == 0) ++counts[sq / 8];
      int k = 0;
      while (k < 8 && idx[k] + 1 == vals.size()) {
        idx[k] = 0;
        ++k;
      }
      if (k == 8) break;
      ++idx[k];
    }
  }
  return counts;
}

// Random form over a with integer coefficients on exponents q(lambda) + k, lo <= k <= hi.
inline VVForm random_form(std::mt19937_64& rng, const FqModule& a, const Rational& weight, int lo, int hi,
                          double density = 0.7) {
  std::uniform_int_distribution<int> c(-9, 9);
  std::uniform_real_distribution<double> u(0, 1);
  VVForm f(a, weight, hi);
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const Rational q = a.q(a.element(i));
    for (int k = lo; k <= hi; ++k) {
      const Rational n = q + k;
      if (n <= hi && u(rng) < density) f.add_to(i, n, c(rng));
    }
  }
  return f;
}

}  // namespace qpb::testing
