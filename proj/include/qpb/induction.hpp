#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "qpb/lattice.hpp"
#include "qpb/qexp.hpp"
#include "qpb/weil.hpp"

namespace qpb {

/// prod over delta of eta(delta tau)^{r_delta}.
struct EtaQuotient {
  std::map<std::int64_t, std::int64_t> exponents;  // delta -> r_delta

  Rational weight() const;
  /// (1/24) sum delta r_delta
  Rational leading_exponent() const;
  std::int64_t level() const;  // lcm of the deltas
  std::string str() const;
};

/// Parses "{1:-8,2:8,4:-8}" (braces optional).
EtaQuotient parse_eta(const std::string& text);

/// Exact expansion up to q^{n_max} from the Euler product.
ScalarQSeries eta_expand(const EtaQuotient& e, const Rational& n_max);

/// Truncated q-series with complex coefficients at rational exponents.
/// `envelope` holds the sum of absolute values of everything added into each coefficient,
/// the scale against which rounding is judged.
struct SlashedSlice {
  std::map<Rational, std::complex<double>> coeffs;
  std::map<Rational, double> envelope;
  Rational weight;
  Rational trunc;

  void set(const Rational& n, std::complex<double> c);
  double scale_at(const Rational& n) const;

  std::int64_t denom() const;
  /// Evaluates sum c_n e(n tau).
  std::complex<double> operator()(std::complex<double> tau) const;
  void add(const SlashedSlice& other, std::complex<double> scale = 1.0);
  static SlashedSlice from_series(const ScalarQSeries& s, const Rational& weight);
};

SlashedSlice operator*(const SlashedSlice& a, const SlashedSlice& b);

/// theta_{K+lambda} raised to a power; K positive definite.
struct ThetaPower {
  EvenLattice lattice;
  std::int64_t coset = 0;  // index in A_K
  int power = 1;
};

/// phi = eta quotient times theta-coset powers.
struct ScalarInput {
  EtaQuotient eta;
  std::vector<ThetaPower> thetas;

  Rational weight() const;
  /// Exact expansion of phi itself.
  ScalarQSeries expand(const Rational& n_max) const;
};

/// Fragments "eta:{1:-8,2:8,4:-8} theta_pow:{lattice:<2>,power:1[,coset:0]}", separated by
/// spaces or ';'.
ScalarInput parse_scalar_input(const std::string& text);
/// The fragment string, or {"eta": ..., "theta_pow": [{"lattice", "power", "coset"}]}.
ScalarInput scalar_input_from_json(const nlohmann::json& j);
std::string to_string(const ScalarInput& phi);

/// Right coset representatives of Gamma_0(d) in SL2(Z), one per point (c : d) of P^1(Z/d),
/// sorted by that point.
std::vector<SL2Matrix> coset_reps_gamma0(std::int64_t d);
std::int64_t gamma0_index(std::int64_t d);
/// Gamma_0(d) gamma == Gamma_0(d) gamma'
bool same_gamma0_coset(const SL2Matrix& a, const SL2Matrix& b, std::int64_t d);

/// exp(pi i ((a + d)/(12c) - s(d, c))) for c > 0; the eta multiplier.
std::complex<double> eta_multiplier(const SL2Matrix& m);
Rational dedekind_sum(std::int64_t h, std::int64_t k);

/// phi|_k w for the eta quotient, w taken as a metaplectic word; known up to trunc.
SlashedSlice slash_eta(const EtaQuotient& e, const GroupWord& w, const Rational& trunc);
/// theta_{K+lambda}|_{rk K/2} w = sum_nu rho_K(w)[lambda, nu] theta_{K+nu}.
SlashedSlice slash_theta_coset(const DiscriminantForm& k, std::int64_t lambda, const GroupWord& w,
                               const Rational& trunc);
SlashedSlice slash_input(const ScalarInput& phi, const GroupWord& w, const Rational& trunc);

/// Vector-valued form with complex coefficients, one slice per element of the module.
struct ComplexForm {
  FqModule module;
  std::vector<SlashedSlice> comps;
};

/// sum_i (psi|gamma_i) rho(gamma_i)^{-1} v with v the sum of e_lambda over `support`.
ComplexForm induce_on_vector(const FqModule& a, const std::vector<std::int64_t>& support, const ScalarInput& psi,
                             const std::vector<SL2Matrix>& reps, const Rational& n_max);
/// ind^mu_M(psi) = sum_i (psi|gamma_i) rho_M(gamma_i)^{-1} e_mu.
ComplexForm induce_mu(const FqModule& m, std::int64_t mu, const ScalarInput& psi, const std::vector<SL2Matrix>& reps,
                      const Rational& n_max);

class RepresentativeDependence : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};
class RationalizationFailure : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};

struct Rationalized {
  VVForm form;
  double residual = 0;  // largest relative distance to the chosen rationals, incl. dropped entries
};

/// Nearest rationals with denominator <= bound, then checks: imaginary parts, distance,
/// and support n in q(lambda) + Z. Entries off the support below tolerance are dropped.
/// Errors are measured relative to max(1, envelope).
Rationalized rationalize(const ComplexForm& f, const Rational& weight, const Rational& n_max, std::int64_t bound,
                         double tolerance = 1e-7);
Rational nearest_rational(double x, std::int64_t max_denominator);

/// Random h gamma with h a word in T, [[1,0],[d,1]], -I and [[x,y],[d,v]] for units v mod d.
std::vector<SL2Matrix> random_transversal(const std::vector<SL2Matrix>& reps, std::int64_t d, std::uint64_t seed);

struct InduceOptions {
  std::int64_t d = 0;  // 0: the level of A
  std::uint64_t seed = 1;
  bool check_independence = true;
  double tolerance = 1e-7;
};

struct InduceResult {
  VVForm form;
  std::int64_t d = 1;
  std::size_t cosets = 0;
  double residual = 0;    // rationalization, relative to the envelope
  double dependence = 0;  // largest relative coefficient difference between two transversals
};

/// ind_A^I(phi). Throws RepresentativeDependence if a random transversal changes a
/// coefficient by more than the tolerance, RationalizationFailure if coefficients are not
/// close to rationals on the support, InputError if d is not a multiple of the level.
InduceResult induce(const FqModule& a, const IsotropicSubgroup& isotropic, const ScalarInput& phi,
                    const Rational& n_max, const InduceOptions& options = {});
inline InduceResult induce(const FqModule& a, const ScalarInput& phi, const Rational& n_max,
                           const InduceOptions& options = {}) {
  return induce(a, IsotropicSubgroup::generate(a, {}), phi, n_max, options);
}

}  // namespace qpb
