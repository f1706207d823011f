#include "qpb/theta.hpp"

#include <algorithm>
#include <cmath>

namespace qpb {

LdlForm ldl_upper(const RatMatrix& g) {
  const Eigen::Index n = g.rows();
  LdlForm f{RatMatrix::Identity(n, n), RatVector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    Rational di = g(i, i);
    for (Eigen::Index k = 0; k < i; ++k) di -= f.d(k) * f.u(k, i) * f.u(k, i);
    if (di <= 0) throw InputError("Gram matrix is not positive definite");
    f.d(i) = di;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Rational s = g(i, j);
      for (Eigen::Index k = 0; k < i; ++k) s -= f.d(k) * f.u(k, i) * f.u(k, j);
      f.u(i, j) = s / di;
    }
  }
  return f;
}

namespace {

class Enumerator {
 public:
  Enumerator(const EvenLattice& lattice, const RatVector& coset, const Rational& bound)
      : n_(lattice.rank()), ldl_(ldl_upper(lattice.rational_gram())), coset_(coset), bound_(bound), v_(n_) {
    if (coset.size() != n_) throw InputError("coset representative has the wrong dimension");
  }

  std::vector<ShortVector> run() {
    if (bound_ < 0) return {};
    if (n_ == 0) return {ShortVector{RatVector(0), Rational(0)}};
    recurse(n_ - 1, 0);
    std::sort(out_.begin(), out_.end(), [](const ShortVector& a, const ShortVector& b) {
      return std::lexicographical_compare(a.v.data(), a.v.data() + a.v.size(), b.v.data(), b.v.data() + b.v.size());
    });
    return std::move(out_);
  }

 private:
  void recurse(Eigen::Index i, const Rational& partial) {
    // Q = sum_i D_i (v_i - t_i)^2 with t_i = -sum_{j>i} U_ij v_j.
    Rational t = 0;
    for (Eigen::Index j = i + 1; j < n_; ++j)
      if (v_(j) != 0) t -= ldl_.u(i, j) * v_(j);
    const Rational room = bound_ - partial;
    const double radius = std::sqrt(std::max(0.0, to_double(room / ldl_.d(i))));
    const double center = to_double(t - coset_(i));
    const Integer lo(static_cast<long long>(std::floor(center - radius)) - 1);
    const Integer hi(static_cast<long long>(std::ceil(center + radius)) + 1);
    for (Integer x = lo; x <= hi; ++x) {
      const Rational vi = coset_(i) + Rational(x);
      const Rational diff = vi - t;
      const Rational next = partial + ldl_.d(i) * diff * diff;
      if (next > bound_) continue;
      v_(i) = vi;
      if (i == 0) out_.push_back(ShortVector{v_, next});
      else recurse(i - 1, next);
    }
    v_(i) = 0;
  }

  Eigen::Index n_;
  LdlForm ldl_;
  RatVector coset_;
  Rational bound_;
  RatVector v_;
  std::vector<ShortVector> out_;
};

}  // namespace

std::vector<ShortVector> short_vectors(const EvenLattice& lattice, const RatVector& coset, const Rational& bound) {
  return Enumerator(lattice, coset, bound).run();
}

ScalarQSeries theta_coset(const EvenLattice& lattice, const RatVector& coset, const Rational& n_max) {
  ScalarQSeries s(1, n_max);
  for (const auto& sv : short_vectors(lattice, coset, 2 * n_max)) s.add_to(sv.norm / 2, 1);
  return s;
}

VVForm theta_vv(const DiscriminantForm& disc, const Rational& n_max) {
  const EvenLattice& k = disc.lattice();
  if (!k.is_positive_definite()) throw InputError("theta series needs a positive definite lattice");
  VVForm f(disc.module(), Rational(k.rank(), 2), n_max);
  for (std::int64_t i = 0; i < disc.module().size(); ++i)
    f.set_component(i, theta_coset(k, disc.lift(disc.module().element(i)), n_max));
  return f;
}

}  // namespace qpb
