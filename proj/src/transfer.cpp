#include "qpb/transfer.hpp"

namespace qpb {

namespace {
void require_module(const FqModule& have, const FqModule& want, const char* what) {
  if (!(have == want)) throw InputError(std::string("module mismatch: ") + what);
}
}  // namespace

VVForm pull_up(const VVForm& f, const QuotientMap& qm) {
  require_module(f.module(), qm.quotient, "form does not live on I^perp / I");
  VVForm out(qm.cover, f.weight(), f.trunc());
  for (std::int64_t i = 0; i < qm.cover.size(); ++i)
    if (qm.projection[i] >= 0) out.set_component(i, f.component(qm.projection[i]));
  return out;
}

VVForm push_down(const VVForm& g, const QuotientMap& qm) {
  require_module(g.module(), qm.cover, "form does not live on the cover A'");
  VVForm out(qm.quotient, g.weight(), g.trunc());
  std::vector<ScalarQSeries> acc(qm.quotient.size(), ScalarQSeries(1, g.trunc()));
  for (std::int64_t i = 0; i < qm.cover.size(); ++i)
    if (qm.projection[i] >= 0) acc[qm.projection[i]] = acc[qm.projection[i]] + g.component(i);
  for (std::int64_t j = 0; j < qm.quotient.size(); ++j) out.set_component(j, acc[j]);
  return out;
}

Eigen::MatrixXd pull_up_matrix(const QuotientMap& qm) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(qm.cover.size(), qm.quotient.size());
  for (std::int64_t i = 0; i < qm.cover.size(); ++i)
    if (qm.projection[i] >= 0) m(i, qm.projection[i]) = 1;
  return m;
}

Eigen::MatrixXd push_down_matrix(const QuotientMap& qm) { return pull_up_matrix(qm).transpose(); }

VVForm theta_contract(const VVForm& f, const FqModule& a_m, const VVForm& theta_k) {
  const FqModule a_k_neg = theta_k.module().negated();
  require_module(f.module(), direct_sum(a_m, a_k_neg), "form does not live on A_M + A_K(-1)");
  const std::int64_t nk = theta_k.size();
  std::vector<ScalarQSeries> comps;
  comps.reserve(a_m.size());
  for (std::int64_t mu = 0; mu < a_m.size(); ++mu) {
    ScalarQSeries g;
    bool first = true;
    for (std::int64_t lam = 0; lam < nk; ++lam) {
      const ScalarQSeries term = f.component(mu * nk + lam) * theta_k.component(lam);
      g = first ? term : g + term;
      first = false;
    }
    comps.push_back(std::move(g));
  }
  Rational t = f.trunc();
  for (const auto& c : comps) t = std::min(t, c.trunc());
  VVForm out(a_m, f.weight() + theta_k.weight(), t);
  for (std::int64_t mu = 0; mu < a_m.size(); ++mu) out.set_component(mu, comps[mu]);
  return out;
}

std::int64_t class_in_L(const EmbeddingData& emb, std::int64_t alpha, std::int64_t nu) {
  const FqModule& am = emb.disc_M.module();
  const FqModule& ak = emb.disc_K_neg.module();
  const Eigen::Index m = emb.M.rank(), r = emb.K_neg.rank();
  RatVector c(m + r);
  c.head(m) = emb.disc_M.lift(am.element(alpha));
  c.tail(r) = emb.disc_K_neg.lift(ak.element(nu));
  const RatVector x = emb.to_L_coords(c);
  if (!emb.disc_L.in_dual(x)) throw InputError("element is not orthogonal to the glue group");
  return emb.disc_L.module().index(emb.disc_L.project(x));
}

VVForm contract_projection_path(const VVForm& f, const EmbeddingData& emb, const VVForm& theta_k) {
  const FqModule& am = emb.disc_M.module();
  const FqModule& ak = emb.disc_K.module();
  require_module(f.module(), emb.disc_L.module(), "form does not live on A_L");
  require_module(theta_k.module(), ak, "theta series does not live on A_K");

  // G_K with iota^{-1}, and G_K^perp, G_M^perp.
  std::vector<std::int64_t> g_k, iota_inv(ak.size(), -1);
  for (const auto& [im, ik] : emb.graph.iota) {
    g_k.push_back(ik);
    iota_inv[ik] = im;
  }
  auto perp_of = [](const FqModule& a, const std::vector<std::int64_t>& sub) {
    std::vector<std::int64_t> out;
    for (std::int64_t x = 0; x < a.size(); ++x) {
      bool ok = true;
      for (auto s : sub)
        if (a.bilinear(a.element(x), a.element(s)) != 0) {
          ok = false;
          break;
        }
      if (ok) out.push_back(x);
    }
    return out;
  };
  const std::vector<std::int64_t> gk_perp = perp_of(ak, g_k);
  for (auto x : gk_perp)
    if (x != 0 && iota_inv[x] >= 0) throw InputError("G_K is degenerate in A_K");
  std::vector<std::int64_t> g_m;
  for (const auto& [im, ik] : emb.graph.iota) g_m.push_back(im);
  const std::vector<std::int64_t> gm_perp = perp_of(am, g_m);

  // lambda = pi'(lambda) + pi(lambda) with pi'(lambda) in G_K and pi(lambda) in G_K^perp.
  std::vector<std::int64_t> pi(ak.size(), -1), pi_prime(ak.size(), -1);
  for (auto g : g_k)
    for (auto h : gk_perp) {
      const std::int64_t lam = ak.index(ak.add(ak.element(g), ak.element(h)));
      pi_prime[lam] = g;
      pi[lam] = h;
    }
  for (std::int64_t lam = 0; lam < ak.size(); ++lam)
    if (pi[lam] < 0) throw ConsistencyError("A_K is not G_K + G_K^perp");

  std::vector<std::vector<ScalarQSeries>> terms(am.size());
  for (std::int64_t lam = 0; lam < ak.size(); ++lam) {
    const FqElement m_g = am.element(iota_inv[pi_prime[lam]]);
    for (auto alpha : gm_perp) {
      const std::int64_t mu = am.index(am.add(am.element(alpha), m_g));
      const std::int64_t cls = class_in_L(emb, alpha, pi[lam]);
      terms[mu].push_back(theta_k.component(lam) * f.component(cls));
    }
  }
  Rational t = f.trunc();
  std::vector<ScalarQSeries> comps(am.size());
  for (std::int64_t mu = 0; mu < am.size(); ++mu) {
    if (terms[mu].empty()) continue;
    ScalarQSeries s = terms[mu][0];
    for (std::size_t i = 1; i < terms[mu].size(); ++i) s = s + terms[mu][i];
    t = std::min(t, s.trunc());
    comps[mu] = std::move(s);
  }
  VVForm out(am, f.weight() + theta_k.weight(), t);
  for (std::int64_t mu = 0; mu < am.size(); ++mu)
    if (!terms[mu].empty()) out.set_component(mu, comps[mu]);
  return out;
}

}  // namespace qpb
