#include "qpb/borcherds.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "qpb/theta.hpp"
#include "qpb/transfer.hpp"
#include "qpb/weil.hpp"

namespace qpb {

namespace {

Rational lowest_exponent(const VVForm& f) {
  Rational v = f.trunc();
  for (std::int64_t i = 0; i < f.size(); ++i) v = std::min(v, f.component(i).valuation());
  return v;
}

std::int64_t minus_rep(const FqModule& a, std::int64_t i) {
  return std::min(i, a.index(a.negate(a.element(i))));
}

}  // namespace

std::map<std::pair<std::int64_t, Rational>, Rational> divisor_table(const VVForm& f) {
  std::map<std::pair<std::int64_t, Rational>, Rational> out;
  for (const auto& t : principal_part(f)) {
    const std::int64_t rep = minus_rep(f.module(), t.index);
    if (rep != t.index) continue;  // c_lambda = c_{-lambda}; record one of the pair
    out[{rep, t.n}] = t.c;
  }
  return out;
}

BorcherdsDescriptor descriptor(const VVForm& f, const Signature& signature) {
  if (signature.positive != 2)
    throw InputError("Borcherds lift needs signature (2, b), got (" + std::to_string(signature.positive) + ", " +
                     std::to_string(signature.negative) + ")");
  const Rational expected = 1 - Rational(signature.negative, 2);
  if (f.weight() != expected)
    throw InputError("input weight " + f.weight().str() + " differs from 1 - b/2 = " + expected.str());
  if (f.trunc() < 0) throw InputError("form must be known up to q^0");
  if (!is_integral_principal_part(f)) throw InputError("principal part is not integral");
  if (!constant_term_even(f)) throw InputError("c_0(0) = " + f.coeff(0, 0).str() + " is not even");
  BorcherdsDescriptor d;
  d.signature = signature;
  d.weight = f.coeff(0, 0) / 2;
  d.divisor = divisor_table(f);
  d.source_trunc = f.trunc();
  return d;
}

bool divisor_refines(const VVForm& f, const VVForm& f_up, const QuotientMap& qm) {
  std::set<std::tuple<std::int64_t, Rational, Rational>> expected, actual;
  for (const auto& t : principal_part(f))
    for (auto mu : qm.fiber(t.index)) expected.insert({mu, t.n, t.c});
  for (const auto& t : principal_part(f_up)) actual.insert({t.index, t.n, t.c});
  return expected == actual;
}

Rational r_order(const VVForm& f, const EmbeddingData& emb, const IntVector& l) {
  if (l.size() != emb.K_neg.rank()) throw InputError("l must be given in coordinates of the K basis");
  Integer content = 0;
  for (Eigen::Index i = 0; i < l.size(); ++i) content = gcd(content, mp::abs(l(i)));
  if (content != 1) throw InputError("l is zero or not primitive in K(-1)");
  const IntVector x = emb.K_neg.basis.transpose() * l;
  const IntVector y = emb.L.gram() * x;
  Integer g = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) g = gcd(g, mp::abs(y(i)));
  // Q l meets L^v in Z (x / g).
  RatVector w0(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) w0(i) = Rational(x(i), g);
  const Rational q0 = emb.L.q(w0);
  const Rational lowest = lowest_exponent(f);
  Rational total = 0;
  for (Integer k = 1;; ++k) {
    const Rational qw = Rational(k * k) * q0;
    if (qw < lowest) break;
    const RatVector w = Rational(k) * w0;
    total += f.coeff(emb.disc_L.module().index(emb.disc_L.project(w)), qw);
  }
  return total;
}

WeightPrediction predicted_qp_weight_unchecked(const VVForm& f, const EmbeddingData& emb) {
  if (f.trunc() < 0) throw InputError("form must be known up to q^0");
  WeightPrediction p;
  p.base = f.coeff(0, 0) / 2;
  const Rational lowest = lowest_exponent(f);
  if (lowest >= 0) return p;
  const EvenLattice& k = emb.K_lattice;
  const FqModule& ak = emb.disc_K.module();

  const VVForm up = pull_up(f, emb.to_L);
  Rational by_vectors = 0;
  for (std::int64_t lam = 0; lam < ak.size(); ++lam) {
    for (const auto& sv : short_vectors(k, emb.disc_K.lift(ak.element(lam)), -2 * lowest)) {
      if (sv.norm == 0) continue;
      const std::int64_t nu = ak.index(emb.disc_K.project(sv.v));
      by_vectors += up.coeff(emb.pair_index(0, nu), -sv.norm / 2);
    }
  }
  p.by_vectors = by_vectors / 2;

  const Integer e = exponent(ak);
  Rational by_orders = 0;
  for (const auto& sv : short_vectors(k, RatVector::Zero(k.rank()), -2 * lowest * Rational(e * e))) {
    if (sv.norm == 0) continue;
    IntVector l(k.rank());
    Integer content = 0;
    for (Eigen::Index i = 0; i < k.rank(); ++i) {
      l(i) = mp::numerator(sv.v(i));
      content = gcd(content, mp::abs(l(i)));
    }
    if (content != 1) continue;
    by_orders += r_order(f, emb, l);
  }
  p.by_orders = by_orders / 2;
  return p;
}

WeightPrediction predicted_qp_weight(const VVForm& f, const EmbeddingData& emb) {
  WeightPrediction p = predicted_qp_weight_unchecked(f, emb);
  if (p.by_vectors != p.by_orders)
    throw ConsistencyError("weight formulas disagree: sum over vectors " + p.by_vectors.str() + ", sum of orders " +
                           p.by_orders.str());
  return p;
}

VVForm quasi_pullback_form(const VVForm& f, const EmbeddingData& emb, const Rational& n_max) {
  if (f.trunc() < n_max)
    throw InputError("input form is known up to q^" + f.trunc().str() + " but q^" + n_max.str() + " is needed");
  const Rational lowest = lowest_exponent(f);
  const VVForm theta = theta_vv(emb.disc_K, n_max - std::min(lowest, Rational(0)));
  return theta_contract(pull_up(f, emb.to_L), emb.disc_M.module(), theta).truncated(n_max);
}

ModularityCheck check_modularity(const VVForm& f) {
  ModularityCheck out;
  const WeilRepresentation rep(f.module());
  const double k = to_double(f.weight());
  const std::int64_t n = f.size();
  auto evaluate = [&](std::complex<double> tau) {
    Eigen::VectorXcd v(n);
    for (std::int64_t i = 0; i < n; ++i) {
      std::complex<double> s = 0;
      for (const auto& [key, c] : f.component(i).terms()) {
        const double e = to_double(f.component(i).exponent(key));
        s += to_double(c) * std::exp(std::complex<double>(0, 2 * std::numbers::pi * e) * tau);
      }
      v(i) = s;
    }
    return v;
  };
  double residual = 0, tolerance = 0;
  for (double theta : {std::numbers::pi / 2 - 0.25, std::numbers::pi / 2 + 0.25}) {
    const std::complex<double> tau = std::polar(1.0, theta);
    const Eigen::VectorXcd at_tau = evaluate(tau);
    const Eigen::VectorXcd at_s = evaluate(-1.0 / tau);
    const std::complex<double> factor = std::exp(k * std::log(tau));
    const Eigen::VectorXcd rhs = factor * (rep.S() * at_tau);
    residual = std::max(residual, (at_s - rhs).cwiseAbs().maxCoeff());
    // Both points have the same imaginary part, so the same |q|.
    const double abs_q = std::exp(-2 * std::numbers::pi * tau.imag());
    double tail = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& terms = f.component(i).terms();
      if (terms.empty()) continue;
      const auto& [key, c] = *terms.rbegin();
      tail += std::abs(to_double(c)) * std::pow(abs_q, to_double(f.component(i).exponent(key)));
    }
    const double scale = std::max(at_tau.cwiseAbs().maxCoeff(), at_s.cwiseAbs().maxCoeff());
    tolerance = std::max(tolerance, 1e3 * tail + 1e-9 * (1 + scale));
  }
  out.performed = true;
  out.residual = residual;
  out.tolerance = tolerance;
  out.pass = residual <= tolerance;
  return out;
}

QPReport verify_main_theorem(const VVForm& f, const EmbeddingData& emb, const Rational& n_max,
                             const VerifyOptions& options) {
  if (n_max < 0) throw InputError("n_max must be >= 0");
  if (f.trunc() < n_max)
    throw InputError("input form is known up to q^" + f.trunc().str() + " but the verifier needs q^" + n_max.str());
  if (!(f.module() == emb.disc_L.module())) throw InputError("input form is not defined on A_L");
  QPReport r;
  r.lattice = emb.L.name();
  r.index = emb.index;
  r.rank_M = emb.M.rank();
  r.rank_K = emb.K_neg.rank();
  r.n_max = n_max;
  r.warnings = emb.warnings;

  r.prediction = predicted_qp_weight_unchecked(f, emb);
  r.routes_agree = r.prediction.by_vectors == r.prediction.by_orders;
  r.predicted_weight = r.prediction.total();

  VVForm source = f;
  if (options.lift_fault) source.add_to(options.lift_fault->index, options.lift_fault->n, options.lift_fault->delta);
  r.g = quasi_pullback_form(source, emb, n_max);
  r.g_integral = is_integral_principal_part(r.g);
  r.g_even = constant_term_even(r.g);
  try {
    r.lifted_weight = descriptor(r.g, emb.M_lattice.signature()).weight;
  } catch (const InputError& e) {
    r.descriptor_error = e.what();
  }

  // Right-hand side: count vectors of K(-1)^v one by one, keyed by class and q_K.
  const VVForm up = pull_up(f, emb.to_L);
  const Rational lowest = std::min(lowest_exponent(f), lowest_exponent(r.g));
  const FqModule& am = emb.disc_M.module();
  const FqModule& ak = emb.disc_K.module();
  std::map<std::pair<std::int64_t, Rational>, Integer> counts;
  const Rational reach = n_max - std::min(lowest_exponent(f), Rational(0));
  for (std::int64_t lam = 0; lam < ak.size(); ++lam)
    for (const auto& sv : short_vectors(emb.K_lattice, emb.disc_K.lift(ak.element(lam)), 2 * reach))
      ++counts[{ak.index(emb.disc_K.project(sv.v)), sv.norm / 2}];

  for (std::int64_t mu = 0; mu < am.size(); ++mu) {
    const Rational q = am.q(am.element(mu));
    Rational l = q + ceil(lowest - q);
    for (; l <= n_max; l += 1) {
      Rational rhs = 0;
      for (const auto& [key, count] : counts) {
        const Rational n = l - key.second;
        if (n < lowest_exponent(f)) continue;
        rhs += Rational(count) * up.coeff(emb.pair_index(mu, key.first), n);
      }
      const Rational lhs = r.g.coeff(mu, l);
      r.checks.push_back({mu, l, lhs, rhs, lhs == rhs});
    }
  }

  if (options.check_modularity) r.modularity = check_modularity(f);

  r.pass = r.routes_agree && r.lifted_weight && *r.lifted_weight == r.predicted_weight && r.failures() == 0 &&
           r.modularity.pass && r.g_integral && r.g_even;
  return r;
}

std::size_t QPReport::failures() const {
  std::size_t n = 0;
  for (const auto& c : checks)
    if (!c.pass) ++n;
  return n;
}

nlohmann::json QPReport::to_json() const {
  nlohmann::json j;
  j["lattice"] = lattice;
  j["index"] = index.str();
  j["rank_M"] = rank_M;
  j["rank_K"] = rank_K;
  j["n_max"] = n_max.str();
  j["weight"] = {{"base", prediction.base.str()},
                 {"sum_over_vectors", prediction.by_vectors.str()},
                 {"sum_of_orders", prediction.by_orders.str()},
                 {"routes_agree", routes_agree},
                 {"predicted", predicted_weight.str()},
                 {"lifted", lifted_weight ? nlohmann::json(lifted_weight->str()) : nlohmann::json(nullptr)}};
  if (!descriptor_error.empty()) j["descriptor_error"] = descriptor_error;
  j["g_integral_principal_part"] = g_integral;
  j["g_even_constant_term"] = g_even;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : checks)
    cells.push_back({{"mu", c.mu}, {"l", c.l.str()}, {"lhs", c.lhs.str()}, {"rhs", c.rhs.str()}, {"pass", c.pass}});
  j["coefficient_checks"] = cells;
  j["coefficient_failures"] = failures();
  j["modularity"] = {{"performed", modularity.performed},
                     {"residual", modularity.residual},
                     {"tolerance", modularity.tolerance},
                     {"pass", modularity.pass}};
  j["warnings"] = warnings;
  j["verdict"] = pass ? "pass" : "fail";
  return j;
}

QPReport QPReport::from_json(const nlohmann::json& j) {
  try {
    QPReport r;
    const auto rat = [](const nlohmann::json& v) { return Rational(v.get<std::string>()); };
    r.lattice = j.at("lattice").get<std::string>();
    r.index = Integer(j.at("index").get<std::string>());
    r.rank_M = j.at("rank_M").get<Eigen::Index>();
    r.rank_K = j.at("rank_K").get<Eigen::Index>();
    r.n_max = rat(j.at("n_max"));
    const auto& w = j.at("weight");
    r.prediction.base = rat(w.at("base"));
    r.prediction.by_vectors = rat(w.at("sum_over_vectors"));
    r.prediction.by_orders = rat(w.at("sum_of_orders"));
    r.routes_agree = w.at("routes_agree").get<bool>();
    r.predicted_weight = rat(w.at("predicted"));
    if (!w.at("lifted").is_null()) r.lifted_weight = rat(w.at("lifted"));
    r.descriptor_error = j.value("descriptor_error", std::string());
    r.g_integral = j.at("g_integral_principal_part").get<bool>();
    r.g_even = j.at("g_even_constant_term").get<bool>();
    for (const auto& c : j.at("coefficient_checks"))
      r.checks.push_back({c.at("mu").get<std::int64_t>(), rat(c.at("l")), rat(c.at("lhs")), rat(c.at("rhs")),
                          c.at("pass").get<bool>()});
    const auto& m = j.at("modularity");
    r.modularity = {m.at("performed").get<bool>(), m.at("residual").get<double>(), m.at("tolerance").get<double>(),
                    m.at("pass").get<bool>()};
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.pass = j.at("verdict").get<std::string>() == "pass";
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
}

std::string QPReport::table() const {
  std::ostringstream os;
  os << "lattice " << (lattice.empty() ? "L" : lattice) << ", [L:L'] = " << index << ", rk M = " << rank_M
     << ", rk K = " << rank_K << ", n_max = " << n_max << "\n";
  os << "weight: c0(0)/2 = " << prediction.base << ", +vectors " << prediction.by_vectors << ", +orders "
     << prediction.by_orders << (routes_agree ? " (agree)" : " (DISAGREE)") << "\n";
  os << "predicted " << predicted_weight << ", lifted "
     << (lifted_weight ? lifted_weight->str() : "n/a (" + descriptor_error + ")") << "\n";
  os << "  mu          l        lhs        rhs  ok\n";
  for (const auto& c : checks) {
    os.width(4);
    os << c.mu << ' ';
    os.width(10);
    os << c.l.str() << ' ';
    os.width(10);
    os << c.lhs.str() << ' ';
    os.width(10);
    os << c.rhs.str() << "  " << (c.pass ? "yes" : "NO") << "\n";
  }
  if (modularity.performed)
    os << "modularity: residual " << modularity.residual << ", tolerance " << modularity.tolerance
       << (modularity.pass ? " ok" : " FAILED") << "\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  os << "verdict: " << (pass ? "pass" : "fail") << "\n";
  return os.str();
}

}  // namespace qpb
