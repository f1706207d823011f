// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qpb/borcherds.hpp"
#include "qpb/induction.hpp"
#include "qpb/theta.hpp"
#include "qpb/transfer.hpp"
#include "qpb/weil.hpp"
#include "support.hpp"

using namespace qpb;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

EmbeddingData split_embedding() {
  return build_embedding(lattices::II_2_26(), testing::unit_rows(28, {4, 5, 6, 7, 8, 9, 10, 11}));
}
EmbeddingData glued_embedding() { return build_embedding(lattices::II_2_26(), testing::unit_rows(28, {4})); }

VVForm inverse_delta_form(int trunc) { return scalar_form(testing::inverse_delta(trunc), -12); }

ScalarInput eta_8_8_8(int theta_power) {
  return parse_scalar_input("eta:{1:-8,2:8,4:-8}" +
                            (theta_power ? " theta_pow:{lattice:<2>,power:" + std::to_string(theta_power) + "}" : ""));
}

std::vector<QuotientMap> random_pairs(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<QuotientMap> out;
  std::uniform_int_distribution<int> rank(1, 3);
  while (static_cast<int>(out.size()) < count) {
    if (out.size() % 2 == 0) {
      // A (+) A(-1) glued along the diagonal
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

void weil_equivariance(Outcome& o) {
  double worst = 0;
  int nontrivial = 0;
  for (const QuotientMap& qm : random_pairs(2024, 25)) {
    o.require(qm.cover.size() <= 50, "|A'| <= 50");
    if (qm.isotropic.size() > 1) ++nontrivial;
    const Eigen::MatrixXcd up = pull_up_matrix(qm).cast<std::complex<double>>();
    const Eigen::MatrixXcd down = push_down_matrix(qm).cast<std::complex<double>>();
    const WeilRepresentation rc(qm.cover), rq(qm.quotient);
    for (const GroupWord& w : {GroupWord::S(), GroupWord::T()}) {
      worst = std::max(worst, (rc(w) * up - up * rq(w)).cwiseAbs().maxCoeff());
      worst = std::max(worst, (rq(w) * down - down * rc(w)).cwiseAbs().maxCoeff());
    }
  }
  o.require(worst < 1e-10, "max entry error < 1e-10");
  o.detail << "25 pairs (" << nontrivial << " with I != 0), max error " << worst;
}

void gauss_milgram(Outcome& o) {
  std::mt19937_64 rng(77);
  double worst = 0;
  int agree = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const EvenLattice l = testing::random_even_lattice(rng, 1 + trial % 6);
    const FqModule a = discriminant_module(l);
    const int expected = ((l.signature().positive - l.signature().negative) % 8 + 8) % 8;
    if (signature_mod8(a) == expected) ++agree;
    worst = std::max(worst, std::abs(std::abs(gauss_sum(a)) - std::sqrt(static_cast<double>(a.size()))));
  }
  o.require(agree == 20, "sigma(A_L) = b+ - b- mod 8");
  o.require(worst < 1e-8, "|Gauss sum| error < 1e-8");
  o.detail << agree << "/20 signatures, max |G| error " << worst;
}

void theta_oracles(Outcome& o) {
  const VVForm th = theta_vv(lattices::E8(), 3);
  const std::vector<long> model = testing::e8_model_counts(3);
  const std::vector<long> expected{1, 240, 2160, 6720};
  for (int n = 0; n <= 3; ++n) {
    o.require(th.coeff(0, n) == model[n], "E8 against the box oracle at q^" + std::to_string(n));
    o.require(model[n] == expected[n], "box oracle gives 1, 240, 2160, 6720");
  }
  std::mt19937_64 rng(91);
  int cosets = 0;
  long vectors = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int rank = 1 + trial % 4;
    const EvenLattice l = testing::random_positive_lattice(rng, rank, 40);
    const DiscriminantForm d(l);
    for (std::int64_t lam = 0; lam < d.module().size(); ++lam) {
      const RatVector coset = d.lift(d.module().element(lam));
      const auto fp = short_vectors(l, coset, 20);
      const auto box = testing::box_vectors(l, coset, 20);
      bool same = fp.size() == box.size();
      for (std::size_t i = 0; same && i < fp.size(); ++i)
        same = std::vector<Rational>(fp[i].v.data(), fp[i].v.data() + rank) == box[i].first && fp[i].norm == box[i].second;
      o.require(same, "Fincke-Pohst = box, rank " + std::to_string(rank));
      ++cosets;
      vectors += static_cast<long>(box.size());
    }
  }
  o.detail << "E8 1, 240, 2160, 6720; " << cosets << " cosets of 40 lattices (rank <= 4, bound 20), " << vectors
           << " vectors";
}

void check_scenario(Outcome& o, const QPReport& r, const Rational& weight) {
  o.require(r.pass, "verdict pass");
  o.require(r.lifted_weight && *r.lifted_weight == weight, "lifted weight " + weight.str());
  o.require(r.predicted_weight == weight, "predicted weight " + weight.str());
  o.require(r.failures() == 0, "no coefficient mismatches");
  bool covers = !r.checks.empty();
  for (const auto& c : r.checks) covers = covers && c.l <= 3;
  o.require(covers && r.n_max == 3, "checks for l <= 3");
  o.detail << "weight " << (r.lifted_weight ? r.lifted_weight->str() : "?") << " = " << r.predicted_weight << ", "
           << r.checks.size() << " exact checks";
}

void split_case(Outcome& o) {
  const EmbeddingData emb = split_embedding();
  validate_embedding(emb);
  o.require(emb.index == 1, "unimodular gluing");
  check_scenario(o, verify_main_theorem(inverse_delta_form(3), emb, 3), 132);
}

void glued_case(Outcome& o) {
  const EmbeddingData emb = glued_embedding();
  validate_embedding(emb);
  o.require(emb.index == 2 && emb.glue.size() == 2, "index-2 glue");
  bool isotropic = true;
  for (const auto& x : emb.glue.elements) isotropic = isotropic && emb.A_L_prime.q(x) == 0;
  o.require(isotropic, "glue group isotropic");
  o.require(emb.graph.iota.size() == 2, "iota: G_M -> G_K of order 2");
  check_scenario(o, verify_main_theorem(inverse_delta_form(3), emb, 3), 13);
  o.detail << ", |I| = " << emb.glue.size();
}

void cross_path(Outcome& o) {
  const VVForm f = inverse_delta_form(4);
  for (const EmbeddingData& emb : {split_embedding(), glued_embedding()}) {
    const VVForm th = theta_vv(emb.disc_K, 4);
    const VVForm general = theta_contract(pull_up(f, emb.to_L), emb.disc_M.module(), th);
    o.require(contract_projection_path(f, emb, th) == general, "projection path = general path, index " +
                                                                   emb.index.str());
    if (emb.index == 1) {
      const VVForm direct = mul_scalar_series(f, th.component(0), th.weight());
      o.require(direct.truncated(general.trunc()) == general, "unimodular case = f theta_E8");
      o.require(general.coeff(0, 0) == 264, "constant term 24 + 240");
    }
  }
  o.detail << "both scenarios to q^4, unimodular case against f theta_E8";
}

void weight_routes(Outcome& o) {
  const VVForm f = inverse_delta_form(3);
  const WeightPrediction e8 = predicted_qp_weight_unchecked(f, split_embedding());
  const WeightPrediction root = predicted_qp_weight_unchecked(f, glued_embedding());
  o.require(e8.by_vectors == e8.by_orders && e8.by_orders == 120, "E8: 120 both ways");
  o.require(root.by_vectors == root.by_orders && root.by_orders == 1, "root: 1 both ways");
  o.detail << "E8 " << e8.by_vectors << " = " << e8.by_orders << ", root " << root.by_vectors << " = " << root.by_orders;
}

void induction_identities(Outcome& o) {
  double residual = 0, dependence = 0;
  int identities = 0;
  const ScalarInput phi = eta_8_8_8(1);
  const FqModule cover = discriminant_module(parse_lattice_expression("sum(<2>, scale(U, 2))"));
  o.require(cover.size() <= 16, "|A'| <= 16");
  const auto track = [&](const InduceResult& r) {
    residual = std::max(residual, r.residual);
    dependence = std::max(dependence, r.dependence);
    return r;
  };
  for (std::int64_t d : {4, 8}) {
    InduceOptions o1, o2;
    o1.d = o2.d = d;
    o2.seed = 99;
    const InduceResult big = track(induce(cover, phi, 3, o1));
    o.require(track(induce(cover, phi, 3, o2)).form == big.form, "two random transversals agree");
    for (std::int64_t i = 1; i < cover.size(); ++i) {
      const FqElement x = cover.element(i);
      if (cover.q(x) != 0) continue;
      const IsotropicSubgroup iso = IsotropicSubgroup::generate(cover, {x});
      const QuotientMap qm = perp_quotient(cover, iso);
      const InduceResult small = track(induce(qm.quotient, phi, 3, o1));
      const InduceResult big_i = track(induce(cover, iso, phi, 3, o1));
      o.require(push_down(big.form, qm) == small.form, "push(ind_A') = ind_A");
      o.require(pull_up(small.form, qm) == big_i.form, "pull(ind_A) = ind_A'^I");
      identities += 2;
    }
  }

  // theta contraction of an induced form, glued case, against the induction over the graph of iota
  const EmbeddingData emb =
      build_embedding(parse_lattice_expression("sum(U, <2>, scale(E8, -1))"), testing::unit_rows(11, {3}), true);
  const Rational n_max = 2;
  const InduceResult f = track(induce(emb.disc_L.module(), phi, n_max + 1));
  const VVForm lhs =
      theta_contract(pull_up(f.form, emb.to_L), emb.disc_M.module(), theta_vv(emb.disc_K, n_max + 2)).truncated(n_max);
  const std::int64_t d = 4;
  for (std::uint64_t seed : {0, 5}) {
    const auto reps = seed ? random_transversal(coset_reps_gamma0(d), d, seed) : coset_reps_gamma0(d);
    ComplexForm sum{emb.disc_M.module(), {}};
    for (const auto& [mu, nu] : emb.graph.iota) {
      ScalarInput psi = phi;
      psi.thetas.push_back({emb.K_lattice, nu, 1});
      const ComplexForm part = induce_mu(emb.disc_M.module(), mu, psi, reps, n_max);
      if (sum.comps.empty()) {
        sum = part;
      } else {
        for (std::size_t i = 0; i < sum.comps.size(); ++i) sum.comps[i].add(part.comps[i]);
      }
    }
    const Rationalized rhs = rationalize(sum, lhs.weight(), n_max, 24 * d * emb.disc_M.module().size());
    residual = std::max(residual, rhs.residual);
    o.require(rhs.form == lhs, "<ind f up, Theta_K> = sum over iota of ind^mu");
    ++identities;
  }
  o.require(residual < 1e-7, "residual < 1e-7");
  o.require(dependence < 1e-7, "transversal dependence < 1e-7");
  o.detail << identities << " exact identities, residual " << residual << ", dependence " << dependence;
}

void fault_detection(Outcome& o) {
  VVForm f = inverse_delta_form(3);
  f.add_to(0, -1, 1);
  const QPReport r = verify_main_theorem(f, glued_embedding(), 3);
  o.require(!r.pass, "perturbed principal part fails");
  o.detail << "perturbed c(-1): verdict " << (r.pass ? "pass" : "fail") << " (modularity residual "
           << r.modularity.residual << ")";

  VerifyOptions lift;
  lift.lift_fault = VerifyOptions::Fault{0, -1, 1};
  const QPReport rl = verify_main_theorem(inverse_delta_form(3), glued_embedding(), 3, lift);
  o.require(!rl.pass, "fault on the lifting path fails");
  o.detail << "; lift fault: " << rl.failures() << " mismatches";

  const std::vector<std::pair<std::string, std::string>> wrong{{"<2>", "theta^2"}, {"<6>", "theta"}};
  for (const auto& [lattice, which] : wrong) {
    bool detected = false;
    try {
      induce(discriminant_module(parse_lattice_expression(lattice)), eta_8_8_8(which == "theta" ? 1 : 2), 2);
    } catch (const RepresentativeDependence&) {
      detected = true;
    }
    o.require(detected, "wrong character on A_" + lattice + " detected");
    o.detail << "; eta " << which << " on A_" << lattice << ": " << (detected ? "dependence detected" : "silent");
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget;  // seconds, 0 for none
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {"Weil equivariance of up/down", 10, weil_equivariance},
      {"Gauss-Milgram signature", 5, gauss_milgram},
      {"theta against brute force", 30, theta_oracles},
      {"quasi-pullback, split case E8(-1)", 60, split_case},
      {"quasi-pullback, glued case <-2>", 60, glued_case},
      {"cross-path equality", 0, cross_path},
      {"weight formula equivalence", 0, weight_routes},
      {"induction identities", 120, induction_identities},
      {"fault detection", 0, fault_detection},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].budget > 0 && secs > criteria[i].budget) {
      o.pass = false;
      o.detail << " [over the " << criteria[i].budget << " s budget]";
    }
    if (!o.pass) ++failed;
    std::printf("%s %zu. %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
