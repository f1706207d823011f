#include <doctest.h>

#include <random>

#include "qpb/theta.hpp"
#include "qpb/transfer.hpp"
#include "qpb/weil.hpp"
#include "support.hpp"

using namespace qpb;

namespace {

// (A', I) pairs: A (+) A(-1) with the diagonal, and single isotropic elements of random modules.
std::vector<QuotientMap> random_pairs(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<QuotientMap> out;
  while (static_cast<int>(out.size()) < count) {
    std::uniform_int_distribution<int> rank(1, 3);
    if (out.size() % 2 == 0) {
      const FqModule a = discriminant_module(testing::random_even_lattice(rng, rank(rng), 7));
      const FqModule cover = direct_sum(a, a.negated());
      std::vector<FqElement> gens;
      for (std::size_t i = 0; i < a.num_generators(); ++i) {
        FqElement g = cover.zero();
        g.coords[i] = 1;
        g.coords[i + a.num_generators()] = 1;
        gens.push_back(g);
      }
      out.push_back(perp_quotient(cover, IsotropicSubgroup::generate(cover, gens)));
    } else {
      const FqModule cover = discriminant_module(testing::random_even_lattice(rng, rank(rng) + 1, 50));
      std::vector<FqElement> iso;
      for (std::int64_t i = 1; i < cover.size(); ++i)
        if (cover.q(cover.element(i)) == 0) iso.push_back(cover.element(i));
      if (iso.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, iso.size() - 1);
      out.push_back(perp_quotient(cover, IsotropicSubgroup::generate(cover, {iso[pick(rng)]})));
    }
  }
  return out;
}

// sum over v in K(-1)^v of c_(mu, v)(l + q_{K(-1)}(v)), enumerating vectors one by one.
Rational contraction_by_vectors(const VVForm& f, const DiscriminantForm& dk, std::int64_t mu, const Rational& l,
                                const Rational& lowest) {
  const FqModule& ak = dk.module();
  Rational total = 0;
  for (std::int64_t lam = 0; lam < ak.size(); ++lam) {
    for (const auto& sv : short_vectors(dk.lattice(), dk.lift(ak.element(lam)), 2 * (l - lowest))) {
      const std::int64_t cls = ak.index(dk.project(sv.v));
      const Rational n = l - sv.norm / 2;
      total += f.coeff(mu * ak.size() + cls, n);
    }
  }
  return total;
}

}  // namespace

TEST_SUITE("transfer") {
  TEST_CASE("trivial isotropic subgroup gives identities") {
    std::mt19937_64 rng(1);
    const FqModule a = discriminant_module(parse_lattice_expression("sum(<2>, <-6>)"));
    const QuotientMap qm = perp_quotient(a, IsotropicSubgroup::generate(a, {}));
    const VVForm f = testing::random_form(rng, a, 0, -1, 2);
    CHECK(pull_up(f, qm).truncated(2) == f);
    CHECK(push_down(f, qm) == f);
  }

  TEST_CASE("pull up from the trivial module to A_E7(-1) + A_<-2>") {
    const EmbeddingData e = build_embedding(lattices::II_2_26(), testing::unit_rows(28, {4}));
    const VVForm f = scalar_form(testing::inverse_delta(2), -12);
    const VVForm up = pull_up(f, e.to_L);
    CHECK(up.size() == 4);
    CHECK(up.component(0) == f.component(0));
    CHECK(up.component(e.pair_index(1, 1)) == f.component(0));
    CHECK(up.component(e.pair_index(0, 1)).is_zero());
    CHECK(up.component(e.pair_index(1, 0)).is_zero());
    CHECK(push_down(up, e.to_L) == scale(2, f));
  }

  TEST_CASE("push down kills components off I^perp and inverts pull up up to |I|") {
    std::mt19937_64 rng(2);
    for (const QuotientMap& qm : random_pairs(8, 10)) {
      const VVForm f = testing::random_form(rng, qm.quotient, 0, -1, 2);
      CHECK(push_down(pull_up(f, qm), qm) == scale(qm.isotropic.size(), f));
      VVForm g(qm.cover, 0, 2);
      for (std::int64_t i = 0; i < qm.cover.size(); ++i)
        if (!qm.in_perp(i)) g.add_to(i, qm.cover.q(qm.cover.element(i)) + 1, 3);
      const VVForm down = push_down(g, qm);
      for (std::int64_t j = 0; j < down.size(); ++j) CHECK(down.component(j).is_zero());
    }
  }

  TEST_CASE("equivariance of up and down with the Weil representation") {
    for (const QuotientMap& qm : random_pairs(19, 25)) {
      REQUIRE(qm.cover.size() <= 50);
      const Eigen::MatrixXcd up = pull_up_matrix(qm).cast<std::complex<double>>();
      const Eigen::MatrixXcd down = push_down_matrix(qm).cast<std::complex<double>>();
      const WeilRepresentation rc(qm.cover), rq(qm.quotient);
      CHECK(rc.signature() == rq.signature());
      for (const GroupWord& w : {GroupWord::S(), GroupWord::T()}) {
        CHECK((rc(w) * up - up * rq(w)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((rq(w) * down - down * rc(w)).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }

  TEST_CASE("theta contraction basics") {
    std::mt19937_64 rng(3);
    const FqModule a = discriminant_module(lattices::A1());
    const VVForm f = testing::random_form(rng, a, -1, -1, 3);
    const VVForm one = theta_vv(EvenLattice(IntMatrix(0, 0)), 10);
    CHECK(theta_contract(f, a, one) == f);
    CHECK(theta_contract(tensor(f, scalar_form(ScalarQSeries::constant(1, 10), 0)), a, one) == f);

    const VVForm th = theta_vv(lattices::E8(), 4);
    const VVForm g = theta_contract(scalar_form(testing::inverse_delta(3), -12), FqModule::trivial(), th);
    CHECK(g.coeff(0, 0) == 264);
    CHECK(g.weight() == -8);
    CHECK(g.trunc() == 3);
    CHECK_THROWS_AS(theta_contract(f, FqModule::trivial(), th), InputError);
  }

  TEST_CASE("coefficient law of the contraction") {
    std::mt19937_64 rng(4);
    const std::vector<std::string> ks = {"A1", "<4>", "sum(A1,A1)", "<6>"};
    for (const auto& name : ks) {
      const EvenLattice k = parse_lattice_expression(name);
      const DiscriminantForm dk(k);
      const FqModule am = discriminant_module(parse_lattice_expression("sum(U, <-2>)"));
      const FqModule cover = direct_sum(am, dk.module().negated());
      const VVForm f = testing::random_form(rng, cover, Rational(-1, 2), -2, 3);
      const VVForm th = theta_vv(dk, 5);
      const VVForm g = theta_contract(f, am, th);
      CHECK(g.trunc() == 3);
      for (std::int64_t mu = 0; mu < am.size(); ++mu) {
        const Rational q = am.q(am.element(mu));
        for (Rational l = q - 2; l <= 3; l += 1) CHECK(g.coeff(mu, l) == contraction_by_vectors(f, dk, mu, l, -2));
      }
    }
  }

  TEST_CASE("projection path equals the general path") {
    std::mt19937_64 rng(5);
    {
      const EmbeddingData e = build_embedding(lattices::II_2_26(), testing::unit_rows(28, {4}));
      const VVForm f = scalar_form(testing::inverse_delta(3), -12);
      const VVForm th = theta_vv(e.disc_K, 4);
      const VVForm general = theta_contract(pull_up(f, e.to_L), e.disc_M.module(), th);
      const VVForm fast = contract_projection_path(f, e, th);
      CHECK(fast == general);
      CHECK(general.coeff(0, 0) == 26);
      const Rational lowest = general.component(1).valuation();
      CHECK(lowest == Rational(-3, 4));
      CHECK(general.coeff(1, lowest) == 2);
      // (1/Delta) Theta_<2> under iota
      const VVForm direct = tensor(f, th);
      for (const auto& [im, ik] : e.graph.iota) CHECK(general.component(im) == direct.component(ik).truncated(general.trunc()));
    }
    const EvenLattice l = parse_lattice_expression("sum(U, <2>, scale(E8,-1))");
    for (Eigen::Index r : {3, 6, 10}) {
      const EmbeddingData e = build_embedding(l, testing::unit_rows(11, {r}), true);
      const VVForm f = testing::random_form(rng, e.disc_L.module(), Rational(-7, 2), -1, 3);
      const VVForm th = theta_vv(e.disc_K, 5);
      CHECK(contract_projection_path(f, e, th) == theta_contract(pull_up(f, e.to_L), e.disc_M.module(), th));
    }
    {
      IntMatrix k = IntMatrix::Zero(2, 11);
      k(0, 3) = 1;
      k(1, 5) = 1;
      const EmbeddingData e = build_embedding(l, k, true);
      const VVForm f = testing::random_form(rng, e.disc_L.module(), Rational(-7, 2), -1, 3);
      const VVForm th = theta_vv(e.disc_K, 5);
      CHECK(contract_projection_path(f, e, th) == theta_contract(pull_up(f, e.to_L), e.disc_M.module(), th));
    }
  }
}
