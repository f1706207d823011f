#include <doctest.h>

#include <random>

#include "qpb/fqm.hpp"
#include "qpb/integer_matrix.hpp"

using namespace qpb;

namespace {

FqModule cyclic(std::int64_t d, Rational q) {
  RatMatrix g(1, 1);
  g(0, 0) = frac(2 * q);
  return FqModule({d}, g, {q});
}

// gcd of all k x k minors, by brute force over row/column subsets.
Integer minor_gcd(const IntMatrix& m, int k) {
  Integer g = 0;
  const int r = static_cast<int>(m.rows()), c = static_cast<int>(m.cols());
  for (int rs = 0; rs < (1 << r); ++rs) {
    if (__builtin_popcount(rs) != k) continue;
    for (int cs = 0; cs < (1 << c); ++cs) {
      if (__builtin_popcount(cs) != k) continue;
      IntMatrix sub(k, k);
      int a = 0;
      for (int i = 0; i < r; ++i) {
        if (!(rs >> i & 1)) continue;
        int b = 0;
        for (int j = 0; j < c; ++j)
          if (cs >> j & 1) sub(a, b++) = m(i, j);
        ++a;
      }
      g = gcd(g, mp::abs(determinant<Integer>(sub)));
    }
  }
  return g;
}

}  // namespace

TEST_SUITE("integer_matrix") {
  TEST_CASE("smith form of small matrices") {
    IntMatrix id = IntMatrix::Identity(2, 2);
    CHECK(smith_normal_form<Integer>(id).d == id);
    IntMatrix z = IntMatrix::Zero(2, 2);
    CHECK(smith_normal_form<Integer>(z).d == z);
    IntMatrix a(2, 2);
    a << 2, 1, 1, 2;
    auto s = smith_normal_form<Integer>(a);
    CHECK(s.d(0, 0) == 1);
    CHECK(s.d(1, 1) == 3);
    CHECK(s.u * a * s.v == s.d);
  }

  TEST_CASE("smith form matches determinantal divisors") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> entry(-6, 6), dim(1, 4);
    for (int trial = 0; trial < 60; ++trial) {
      const int r = dim(rng), c = dim(rng);
      IntMatrix m(r, c);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = entry(rng) * (trial % 3 == 0 ? 2 : 1);
      const auto s = smith_normal_form<Integer>(m);
      REQUIRE(s.u * m * s.v == s.d);
      CHECK(mp::abs(determinant<Integer>(s.u)) == 1);
      CHECK(mp::abs(determinant<Integer>(s.v)) == 1);
      Integer prod = 1;
      for (int k = 1; k <= std::min(r, c); ++k) {
        prod *= s.d(k - 1, k - 1);
        CHECK(prod == minor_gcd(m, k));
        if (k >= 2 && s.d(k - 2, k - 2) != 0) CHECK(s.d(k - 1, k - 1) % s.d(k - 2, k - 2) == 0);
      }
    }
  }

  TEST_CASE("kernel, saturation and inertia") {
    IntMatrix m(1, 3);
    m << 2, 4, 6;
    IntMatrix k = integer_kernel(m);
    CHECK(k.rows() == 2);
    CHECK((m * k.transpose()).isZero());
    CHECK(is_primitive(k));
    IntMatrix b(1, 2);
    b << 2, 4;
    CHECK_FALSE(is_primitive(b));
    CHECK(saturation(b) == (IntMatrix(1, 2) << 1, 2).finished());
    RatMatrix u(2, 2);
    u << 0, 1, 1, 0;
    const auto in = inertia(u);
    CHECK(in.positive == 1);
    CHECK(in.negative == 1);
  }
}

TEST_SUITE("fqm") {
  TEST_CASE("values on A_<2> and A_<-2>") {
    const FqModule a = cyclic(2, Rational(1, 4));
    const FqElement g = a.generator(0);
    CHECK(a.q(g) == Rational(1, 4));
    CHECK(a.q(a.zero()) == 0);
    CHECK(a.bilinear(g, g) == Rational(1, 2));
    CHECK(signature_mod8(a) == 1);
    CHECK(level(a) == 4);
    CHECK(signature_mod8(a.negated()) == 7);
    CHECK(a.negated().q(g) == Rational(3, 4));
    CHECK(level(cyclic(2, Rational(3, 4))) == 4);
  }

  TEST_CASE("trivial module") {
    const FqModule t = FqModule::trivial();
    CHECK(t.size() == 1);
    CHECK(signature_mod8(t) == 0);
    CHECK(level(t) == 1);
    CHECK(direct_sum(t, cyclic(2, Rational(1, 4))) == cyclic(2, Rational(1, 4)));
  }

  TEST_CASE("q is even and bilinear form is bilinear") {
    RatMatrix g(2, 2);
    g << Rational(1, 4), Rational(1, 2), Rational(1, 2), Rational(1, 2);
    const FqModule a({4, 2}, g, {Rational(1, 8), Rational(1, 4)});
    for (std::int64_t i = 0; i < a.size(); ++i) {
      const auto x = a.element(i);
      CHECK(a.q(x) == a.q(a.negate(x)));
      CHECK(a.index(x) == i);
      for (std::int64_t j = 0; j < a.size(); ++j) {
        const auto y = a.element(j);
        CHECK(a.bilinear(x, y) == frac(a.q(a.add(x, y)) - a.q(x) - a.q(y)));
      }
    }
  }

  TEST_CASE("inconsistent data is rejected") {
    RatMatrix g(1, 1);
    g(0, 0) = Rational(1, 4);
    CHECK_THROWS_AS(FqModule({2}, g, {Rational(1, 4)}), InputError);
    RatMatrix z = RatMatrix::Zero(1, 1);
    const FqModule degenerate({2}, z, {Rational(0)});
    CHECK_FALSE(degenerate.is_nondegenerate());
    CHECK_THROWS_AS(signature_mod8(degenerate), ConsistencyError);
  }

  TEST_CASE("perp quotient by the trivial subgroup") {
    const FqModule a = direct_sum(cyclic(2, Rational(1, 4)), cyclic(4, Rational(1, 8)));
    const auto qm = perp_quotient(a, IsotropicSubgroup::generate(a, {}));
    CHECK(qm.quotient.size() == a.size());
    qm.validate();
    for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a.q(a.element(i)) == qm.quotient.q(qm.quotient.element(qm.projection[i])));
  }

  TEST_CASE("perp quotient of A_E7(-1) + A_<-2> by the diagonal") {
    const FqModule a = direct_sum(cyclic(2, Rational(1, 4)), cyclic(2, Rational(3, 4)));
    const auto iso = IsotropicSubgroup::generate(a, {FqElement{{1, 1}}});
    CHECK(iso.size() == 2);
    const auto qm = perp_quotient(a, iso);
    CHECK(qm.quotient.size() == 1);
    qm.validate();
    const GlueGraph gg = extract_graph(cyclic(2, Rational(1, 4)), cyclic(2, Rational(3, 4)), iso.elements);
    CHECK(gg.iota.size() == 2);
    CHECK(gg.iota[1] == std::pair<std::int64_t, std::int64_t>{1, 1});
  }

  TEST_CASE("perp quotient of the hyperbolic plane mod 2") {
    RatMatrix g(2, 2);
    g << 0, Rational(1, 2), Rational(1, 2), 0;
    const FqModule a({2, 2}, g, {Rational(0), Rational(0)});
    CHECK(signature_mod8(a) == 0);
    const auto qm = perp_quotient(a, IsotropicSubgroup::generate(a, {FqElement{{1, 0}}}));
    CHECK(qm.quotient.size() == 1);
    CHECK(qm.in_perp(a.index(FqElement{{1, 0}})));
    CHECK_FALSE(qm.in_perp(a.index(FqElement{{0, 1}})));
    qm.validate();
  }

  TEST_CASE("perp quotient of a larger cyclic module") {
    const FqModule a = cyclic(9, Rational(1, 9));
    CHECK(a.is_nondegenerate());
    const auto iso = IsotropicSubgroup::generate(a, {FqElement{{3}}});
    CHECK(iso.size() == 3);
    const auto qm = perp_quotient(a, iso);
    CHECK(qm.quotient.size() == 1);
    qm.validate();
    CHECK(signature_mod8(a) == signature_mod8(qm.quotient));
    CHECK_THROWS_AS(IsotropicSubgroup::generate(a, {FqElement{{1}}}), InputError);
  }

  TEST_CASE("non-injective graph is rejected") {
    const FqModule a1 = cyclic(2, Rational(0));
    CHECK_THROWS_AS(extract_graph(a1, FqModule::trivial(), {FqElement{{0}}, FqElement{{1}}}), ConsistencyError);
  }

  TEST_CASE("json round trip") {
    const FqModule a = direct_sum(cyclic(2, Rational(1, 4)), cyclic(3, Rational(1, 3)));
    CHECK(fqm_from_json(to_json(a)) == a);
  }
}
