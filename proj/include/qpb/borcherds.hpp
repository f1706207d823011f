#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qpb/lattice.hpp"
#include "qpb/qexp.hpp"

namespace qpb {

/// Weight and Heegner-divisor table of the Borcherds lift of f.
/// Divisor keys are (lambda, n) with lambda the smaller index of {lambda, -lambda}.
struct BorcherdsDescriptor {
  Signature signature;
  Rational weight;
  std::map<std::pair<std::int64_t, Rational>, Rational> divisor;
  Rational source_trunc;
};

/// Checks the input conditions (signature (2, b), weight 1 - b/2, integral principal
/// part, even c_0(0)) and throws InputError naming the first one that fails.
BorcherdsDescriptor descriptor(const VVForm& f, const Signature& signature);

/// Principal-part table keyed as in BorcherdsDescriptor, without the hypothesis checks.
std::map<std::pair<std::int64_t, Rational>, Rational> divisor_table(const VVForm& f);

/// Checks Z(lambda, n)_L = sum over mu in p^{-1}(lambda) of Z(mu, n)_{L'}: the table of
/// f up lists exactly the fibers of the table of f with the same multiplicities.
bool divisor_refines(const VVForm& f, const VVForm& f_up, const QuotientMap& qm);

/// Order of the Borcherds product of f along l^perp for l a primitive vector of
/// K(-1), given in coordinates of the K basis.
Rational r_order(const VVForm& f, const EmbeddingData& emb, const IntVector& l);

struct WeightPrediction {
  Rational base;         // c_0(0) / 2
  Rational by_vectors;   // sum over +-v != 0 in K(-1)^v of c_{(0,v)}(q(v)), using f up
  Rational by_orders;    // sum over primitive +-l in K(-1) of r(l)
  Rational total() const { return base + by_vectors; }
};

/// Computes both weight formulas; throws ConsistencyError if they disagree.
WeightPrediction predicted_qp_weight(const VVForm& f, const EmbeddingData& emb);
/// Same, but returns the disagreement instead of throwing.
WeightPrediction predicted_qp_weight_unchecked(const VVForm& f, const EmbeddingData& emb);

/// g = <f up, Theta_K> known up to q^{n_max}; needs f.trunc() >= n_max.
VVForm quasi_pullback_form(const VVForm& f, const EmbeddingData& emb, const Rational& n_max);

struct CoefficientCheck {
  std::int64_t mu;
  Rational l;
  Rational lhs;  // from g
  Rational rhs;  // from vectors of K(-1)^v and f up
  bool pass;
};

/// Numerical S-relation F(-1/tau) = tau^k rho(S) F(tau) at two points of the unit circle.
struct ModularityCheck {
  bool performed = false;
  double residual = 0;
  double tolerance = 0;
  bool pass = true;
};
ModularityCheck check_modularity(const VVForm& f);

struct VerifyOptions {
  bool check_modularity = true;
  /// Adds delta to c_lambda(n) of f on the path that builds g only.
  struct Fault {
    std::int64_t index;
    Rational n;
    Rational delta;
  };
  std::optional<Fault> lift_fault;
};

struct QPReport {
  std::string lattice;
  Integer index = 1;
  Eigen::Index rank_M = 0;
  Eigen::Index rank_K = 0;
  Rational n_max;
  WeightPrediction prediction;
  bool routes_agree = false;
  Rational predicted_weight;
  std::optional<Rational> lifted_weight;
  std::string descriptor_error;
  bool g_integral = false;
  bool g_even = false;
  VVForm g;
  std::vector<CoefficientCheck> checks;
  ModularityCheck modularity;
  std::vector<std::string> warnings;
  bool pass = false;

  std::size_t failures() const;
  nlohmann::json to_json() const;
  /// Inverse of to_json; g is not part of the report and stays empty.
  static QPReport from_json(const nlohmann::json& j);
  std::string table() const;
};

/// Checks the quasi-pullback identity for f. Never throws on a failed identity; failures are report content.
QPReport verify_main_theorem(const VVForm& f, const EmbeddingData& emb, const Rational& n_max,
                             const VerifyOptions& options = {});

}  // namespace qpb
