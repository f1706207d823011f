#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpb/fqm.hpp"
#include "qpb/types.hpp"

namespace qpb {

/// Truncated Laurent series in q^{1/N} with exact rational coefficients.
/// Coefficients are known for all exponents <= trunc; unstored ones are zero.
class ScalarQSeries {
 public:
  ScalarQSeries() = default;
  ScalarQSeries(std::int64_t denom, Rational trunc);

  /// Constant series c, known up to trunc.
  static ScalarQSeries constant(const Rational& c, const Rational& trunc);
  /// Single term c q^n, known up to trunc.
  static ScalarQSeries monomial(const Rational& c, const Rational& n, const Rational& trunc);

  std::int64_t denom() const { return denom_; }
  const Rational& trunc() const { return trunc_; }
  /// Stored terms keyed by N * exponent.
  const std::map<std::int64_t, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Rational exponent(std::int64_t key) const { return Rational(key, denom_); }
  /// Throws InputError if n > trunc; 0 for exponents outside (1/N)Z.
  Rational coeff(const Rational& n) const;
  void set(const Rational& n, const Rational& c);
  void add_to(const Rational& n, const Rational& c);

  /// Lowest exponent with a nonzero coefficient, or trunc for the zero series.
  Rational valuation() const;

  ScalarQSeries truncated(const Rational& t) const;
  /// Same series with exponent denominator a multiple m of the current one.
  ScalarQSeries with_denom(std::int64_t m) const;

  bool operator==(const ScalarQSeries& other) const;

 private:
  std::int64_t key(const Rational& n, bool strict) const;

  std::int64_t denom_ = 1;
  Rational trunc_ = 0;
  std::map<std::int64_t, Rational> terms_;
};

ScalarQSeries operator+(const ScalarQSeries& a, const ScalarQSeries& b);
ScalarQSeries operator-(const ScalarQSeries& a, const ScalarQSeries& b);
ScalarQSeries operator*(const Rational& c, const ScalarQSeries& a);
/// Cauchy product valid up to min(Ta + vb, Tb + va), v the valuations.
ScalarQSeries operator*(const ScalarQSeries& a, const ScalarQSeries& b);
/// a^k for k >= 0.
ScalarQSeries pow(const ScalarQSeries& a, int k);

/// Vector-valued truncated q-expansion: one ScalarQSeries per element of the
/// module, indexed by the canonical enumeration.
class VVForm {
 public:
  VVForm() = default;
  /// Zero form known up to trunc.
  VVForm(FqModule module, Rational weight, Rational trunc);

  const FqModule& module() const { return module_; }
  const Rational& weight() const { return weight_; }
  const Rational& trunc() const { return trunc_; }
  std::int64_t size() const { return module_.size(); }

  const ScalarQSeries& component(std::int64_t index) const { return comps_[index]; }
  const ScalarQSeries& component(const FqElement& x) const { return comps_[module_.index(x)]; }
  /// Replaces a component; its trunc must be >= the form's trunc (it is cut to it).
  void set_component(std::int64_t index, const ScalarQSeries& s);
  void set_weight(const Rational& k) { weight_ = k; }

  Rational coeff(std::int64_t index, const Rational& n) const { return comps_[index].coeff(n); }
  void add_to(std::int64_t index, const Rational& n, const Rational& c);

  VVForm truncated(const Rational& t) const;
  /// Every stored (lambda, n) has n in q(lambda) + Z.
  bool satisfies_support() const;
  /// Throws ConsistencyError naming the first offending entry.
  void require_support() const;

  bool operator==(const VVForm& other) const;

 private:
  FqModule module_;
  Rational weight_ = 0;
  Rational trunc_ = 0;
  std::vector<ScalarQSeries> comps_;
};

VVForm add(const VVForm& f, const VVForm& g);
VVForm scale(const Rational& c, const VVForm& f);
/// Componentwise product with a scalar series with integral exponents.
VVForm mul_scalar_series(const VVForm& f, const ScalarQSeries& s, const Rational& weight_shift);
/// Form over A1 (+) A2 with c_(l,m)(n) = sum_{a+b=n} c_l(a) c_m(b).
VVForm tensor(const VVForm& f, const VVForm& g);

/// Form over the trivial module with the given single component.
VVForm scalar_form(const ScalarQSeries& s, const Rational& weight);

struct PrincipalTerm {
  std::int64_t index;
  Rational n;
  Rational c;
};
/// Terms with n < 0; throws InputError if trunc < 0.
std::vector<PrincipalTerm> principal_part(const VVForm& f);
bool is_integral_principal_part(const VVForm& f);
/// c_0(0) in 2Z.
bool constant_term_even(const VVForm& f);
/// c_lambda(n) == c_{-lambda}(n) for every stored entry. Requires 2k = sigma(A) mod 4,
/// the case where Z = S^2 forces this symmetry; throws InputError otherwise.
bool check_minus_symmetry(const VVForm& f);

struct CoefficientMismatch {
  std::int64_t index;
  Rational n;
  Rational lhs;
  Rational rhs;
};
/// Entries where f and g differ, up to min(f.trunc, g.trunc). Modules must match.
std::vector<CoefficientMismatch> compare(const VVForm& f, const VVForm& g);

/// Series file: {"module", "weight", "trunc", "entries": [[coords, n_num, n_den, c_num, c_den], ...]}.
/// The writer is deterministic (sorted entries, one per line).
void write_series(std::ostream& os, const VVForm& f);
std::string series_to_string(const VVForm& f);
VVForm read_series(std::istream& is);
VVForm series_from_json(const nlohmann::json& j);

}  // namespace qpb
