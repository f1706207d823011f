#include "qpb/qexp.hpp"

#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace qpb {

namespace {

std::int64_t to_i64(const Integer& x) {
  if (x > Integer(std::numeric_limits<std::int64_t>::max()) || x < Integer(std::numeric_limits<std::int64_t>::min()))
    throw InputError("exponent out of range");
  return x.convert_to<std::int64_t>();
}

}  // namespace

ScalarQSeries::ScalarQSeries(std::int64_t denom, Rational trunc) : denom_(denom), trunc_(std::move(trunc)) {
  if (denom_ < 1) throw InputError("series exponent denominator must be positive");
}

ScalarQSeries ScalarQSeries::constant(const Rational& c, const Rational& trunc) {
  return monomial(c, 0, trunc);
}

ScalarQSeries ScalarQSeries::monomial(const Rational& c, const Rational& n, const Rational& trunc) {
  ScalarQSeries s(1, trunc);
  if (n <= trunc) s.set(n, c);
  return s;
}

std::int64_t ScalarQSeries::key(const Rational& n, bool strict) const {
  const Rational k = n * denom_;
  if (!is_integer(k)) {
    if (strict) throw InputError("exponent " + n.str() + " is not in (1/" + std::to_string(denom_) + ")Z");
    return std::numeric_limits<std::int64_t>::min();
  }
  return to_i64(mp::numerator(k));
}

Rational ScalarQSeries::coeff(const Rational& n) const {
  if (n > trunc_) throw InputError("coefficient at q^" + n.str() + " requested beyond truncation " + trunc_.str());
  const std::int64_t k = key(n, false);
  if (k == std::numeric_limits<std::int64_t>::min()) return 0;
  auto it = terms_.find(k);
  return it == terms_.end() ? Rational(0) : it->second;
}

void ScalarQSeries::set(const Rational& n, const Rational& c) {
  if (n > trunc_) throw InputError("exponent " + n.str() + " beyond truncation " + trunc_.str());
  const std::int64_t need = to_i64(mp::denominator(n));
  if (denom_ % need != 0) *this = with_denom(std::lcm(denom_, need));
  const std::int64_t k = key(n, true);
  if (c == 0) terms_.erase(k);
  else terms_[k] = c;
}

void ScalarQSeries::add_to(const Rational& n, const Rational& c) {
  if (c == 0) return;
  if (n > trunc_) throw InputError("exponent " + n.str() + " beyond truncation " + trunc_.str());
  const std::int64_t need = to_i64(mp::denominator(n));
  if (denom_ % need != 0) *this = with_denom(std::lcm(denom_, need));
  const std::int64_t k = key(n, true);
  auto [it, inserted] = terms_.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Rational ScalarQSeries::valuation() const {
  if (terms_.empty()) return trunc_;
  return exponent(terms_.begin()->first);
}

ScalarQSeries ScalarQSeries::truncated(const Rational& t) const {
  ScalarQSeries out(denom_, t < trunc_ ? t : trunc_);
  for (const auto& [k, c] : terms_) {
    if (exponent(k) > out.trunc_) break;
    out.terms_.emplace_hint(out.terms_.end(), k, c);
  }
  return out;
}

ScalarQSeries ScalarQSeries::with_denom(std::int64_t m) const {
  if (m % denom_ != 0) throw InputError("new exponent denominator must be a multiple of the old one");
  ScalarQSeries out(m, trunc_);
  const std::int64_t f = m / denom_;
  for (const auto& [k, c] : terms_) out.terms_.emplace_hint(out.terms_.end(), k * f, c);
  return out;
}

bool ScalarQSeries::operator==(const ScalarQSeries& other) const {
  if (trunc_ != other.trunc_) return false;
  const std::int64_t l = std::lcm(denom_, other.denom_);
  return with_denom(l).terms_ == other.with_denom(l).terms_;
}

ScalarQSeries operator+(const ScalarQSeries& a, const ScalarQSeries& b) {
  const std::int64_t l = std::lcm(a.denom(), b.denom());
  ScalarQSeries out = a.with_denom(l).truncated(std::min(a.trunc(), b.trunc()));
  for (const auto& [k, c] : b.terms()) {
    const Rational n = b.exponent(k);
    if (n > out.trunc()) break;
    out.add_to(n, c);
  }
  return out;
}

ScalarQSeries operator*(const Rational& c, const ScalarQSeries& a) {
  ScalarQSeries out(a.denom(), a.trunc());
  if (c == 0) return out;
  for (const auto& [k, v] : a.terms()) out.set(a.exponent(k), c * v);
  return out;
}

ScalarQSeries operator-(const ScalarQSeries& a, const ScalarQSeries& b) { return a + Rational(-1) * b; }

ScalarQSeries operator*(const ScalarQSeries& a, const ScalarQSeries& b) {
  const Rational ta = a.trunc() + b.valuation();
  const Rational tb = b.trunc() + a.valuation();
  const Rational t = ta < tb ? ta : tb;
  const std::int64_t l = std::lcm(a.denom(), b.denom());
  const ScalarQSeries x = a.with_denom(l), y = b.with_denom(l);
  ScalarQSeries out(l, t);
  const Rational tl = t * l;
  const std::int64_t kmax = to_i64(floor(tl));
  std::map<std::int64_t, Rational> acc;
  for (const auto& [ka, ca] : x.terms()) {
    for (const auto& [kb, cb] : y.terms()) {
      if (ka + kb > kmax) break;
      acc[ka + kb] += ca * cb;
    }
  }
  for (const auto& [k, c] : acc)
    if (c != 0) out.set(Rational(k, l), c);
  return out;
}

ScalarQSeries pow(const ScalarQSeries& a, int k) {
  if (k < 0) throw InputError("negative power of a truncated series");
  if (k == 0) return ScalarQSeries::constant(1, a.trunc());
  ScalarQSeries out = a;
  for (int i = 1; i < k; ++i) out = out * a;
  return out;
}

VVForm::VVForm(FqModule module, Rational weight, Rational trunc)
    : module_(std::move(module)), weight_(std::move(weight)), trunc_(std::move(trunc)) {
  comps_.assign(module_.size(), ScalarQSeries(1, trunc_));
}

void VVForm::set_component(std::int64_t index, const ScalarQSeries& s) {
  if (s.trunc() < trunc_)
    throw InputError("component known only up to " + s.trunc().str() + " < form truncation " + trunc_.str());
  comps_[index] = s.truncated(trunc_);
}

void VVForm::add_to(std::int64_t index, const Rational& n, const Rational& c) { comps_[index].add_to(n, c); }

VVForm VVForm::truncated(const Rational& t) const {
  VVForm out = *this;
  if (t < trunc_) out.trunc_ = t;
  for (auto& c : out.comps_) c = c.truncated(out.trunc_);
  return out;
}

bool VVForm::satisfies_support() const {
  try {
    require_support();
    return true;
  } catch (const ConsistencyError&) {
    return false;
  }
}

void VVForm::require_support() const {
  for (std::int64_t i = 0; i < size(); ++i) {
    const Rational q = module_.q(module_.element(i));
    for (const auto& [k, c] : comps_[i].terms()) {
      const Rational n = comps_[i].exponent(k);
      if (!is_integer(n - q))
        throw ConsistencyError("support condition violated at component " + std::to_string(i) + ", exponent " +
                               n.str() + " (q = " + q.str() + ")");
    }
  }
}

bool VVForm::operator==(const VVForm& other) const {
  return module_ == other.module_ && weight_ == other.weight_ && trunc_ == other.trunc_ && comps_ == other.comps_;
}

namespace {
void require_same_module(const VVForm& f, const VVForm& g) {
  if (!(f.module() == g.module())) throw InputError("forms live on different finite quadratic modules");
}
}  // namespace

VVForm add(const VVForm& f, const VVForm& g) {
  require_same_module(f, g);
  if (f.weight() != g.weight()) throw InputError("adding forms of different weight");
  VVForm out(f.module(), f.weight(), std::min(f.trunc(), g.trunc()));
  for (std::int64_t i = 0; i < f.size(); ++i) out.set_component(i, f.component(i) + g.component(i));
  return out;
}

VVForm scale(const Rational& c, const VVForm& f) {
  VVForm out(f.module(), f.weight(), f.trunc());
  for (std::int64_t i = 0; i < f.size(); ++i) out.set_component(i, c * f.component(i));
  return out;
}

namespace {

VVForm from_products(const FqModule& module, const Rational& weight, std::vector<ScalarQSeries> comps) {
  Rational t = comps.empty() ? Rational(0) : comps[0].trunc();
  for (const auto& c : comps) t = std::min(t, c.trunc());
  VVForm out(module, weight, t);
  for (std::size_t i = 0; i < comps.size(); ++i) out.set_component(static_cast<std::int64_t>(i), comps[i]);
  return out;
}

Rational min_valuation(const VVForm& f) {
  Rational v = f.trunc();
  for (std::int64_t i = 0; i < f.size(); ++i) v = std::min(v, f.component(i).valuation());
  return v;
}

}  // namespace

VVForm mul_scalar_series(const VVForm& f, const ScalarQSeries& s, const Rational& weight_shift) {
  for (const auto& [k, c] : s.terms())
    if (!is_integer(s.exponent(k))) throw InputError("scalar series must have integral exponents to preserve the support");
  std::vector<ScalarQSeries> comps;
  comps.reserve(f.size());
  for (std::int64_t i = 0; i < f.size(); ++i) comps.push_back(f.component(i) * s);
  VVForm out = from_products(f.module(), f.weight() + weight_shift, std::move(comps));
  if (out.trunc() < min_valuation(f) + s.valuation()) throw InputError("truncation underflow in series product");
  return out;
}

VVForm tensor(const VVForm& f, const VVForm& g) {
  const FqModule m = direct_sum(f.module(), g.module());
  std::vector<ScalarQSeries> comps;
  comps.reserve(m.size());
  for (std::int64_t i = 0; i < f.size(); ++i)
    for (std::int64_t j = 0; j < g.size(); ++j) comps.push_back(f.component(i) * g.component(j));
  VVForm out = from_products(m, f.weight() + g.weight(), std::move(comps));
  if (out.trunc() < min_valuation(f) + min_valuation(g)) throw InputError("truncation underflow in tensor product");
  return out;
}

VVForm scalar_form(const ScalarQSeries& s, const Rational& weight) {
  VVForm out(FqModule::trivial(), weight, s.trunc());
  out.set_component(0, s);
  return out;
}

std::vector<PrincipalTerm> principal_part(const VVForm& f) {
  if (f.trunc() < 0) throw InputError("principal part needs the form known up to q^0");
  std::vector<PrincipalTerm> out;
  for (std::int64_t i = 0; i < f.size(); ++i) {
    const auto& s = f.component(i);
    for (const auto& [k, c] : s.terms()) {
      if (k >= 0) break;
      out.push_back({i, s.exponent(k), c});
    }
  }
  return out;
}

bool is_integral_principal_part(const VVForm& f) {
  for (const auto& t : principal_part(f))
    if (!is_integer(t.c)) return false;
  return true;
}

bool constant_term_even(const VVForm& f) {
  if (f.trunc() < 0) throw InputError("constant term needs the form known up to q^0");
  const Rational c = f.coeff(0, 0);
  return is_integer(c) && mp::numerator(c) % 2 == 0;
}

bool check_minus_symmetry(const VVForm& f) {
  const Rational two_k = 2 * f.weight();
  if (!is_integer(two_k)) throw InputError("weight is not a half-integer");
  const int sigma = signature_mod8(f.module());
  if (mod(mp::numerator(two_k) - sigma, Integer(4)) != 0)
    throw InputError("minus symmetry is only forced when 2k = sigma(A) mod 4 (here 2k = " + two_k.str() +
                     ", sigma = " + std::to_string(sigma) + ")");
  const FqModule& a = f.module();
  for (std::int64_t i = 0; i < f.size(); ++i) {
    const std::int64_t j = a.index(a.negate(a.element(i)));
    if (j < i) continue;
    if (!(f.component(i) == f.component(j))) return false;
  }
  return true;
}

std::vector<CoefficientMismatch> compare(const VVForm& f, const VVForm& g) {
  require_same_module(f, g);
  const Rational t = std::min(f.trunc(), g.trunc());
  std::vector<CoefficientMismatch> out;
  for (std::int64_t i = 0; i < f.size(); ++i) {
    const ScalarQSeries a = f.component(i).truncated(t);
    const ScalarQSeries b = g.component(i).truncated(t);
    std::map<Rational, std::pair<Rational, Rational>> cells;
    for (const auto& [k, c] : a.terms()) cells[a.exponent(k)].first = c;
    for (const auto& [k, c] : b.terms()) cells[b.exponent(k)].second = c;
    for (const auto& [n, v] : cells)
      if (v.first != v.second) out.push_back({i, n, v.first, v.second});
  }
  return out;
}

namespace {

std::string json_integer(const Integer& x) {
  if (x >= Integer(std::numeric_limits<std::int64_t>::min()) && x <= Integer(std::numeric_limits<std::int64_t>::max()))
    return x.str();
  return "\"" + x.str() + "\"";
}

Integer integer_from_json(const nlohmann::json& v) {
  if (v.is_number_integer()) return Integer(v.get<std::int64_t>());
  if (v.is_string()) return Integer(v.get<std::string>());
  throw InputError("expected an integer");
}

Rational rational_from_json(const nlohmann::json& v) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw InputError("expected a rational");
}

}  // namespace

void write_series(std::ostream& os, const VVForm& f) {
  os << "{\n";
  os << "  \"module\": " << to_json(f.module()).dump() << ",\n";
  os << "  \"weight\": \"" << f.weight().str() << "\",\n";
  os << "  \"trunc\": \"" << f.trunc().str() << "\",\n";
  os << "  \"entries\": [";
  bool first = true;
  for (std::int64_t i = 0; i < f.size(); ++i) {
    const FqElement x = f.module().element(i);
    std::string coords = "[";
    for (std::size_t j = 0; j < x.coords.size(); ++j) coords += (j ? "," : "") + std::to_string(x.coords[j]);
    coords += "]";
    const auto& s = f.component(i);
    for (const auto& [k, c] : s.terms()) {
      const Rational n = s.exponent(k);
      os << (first ? "\n    " : ",\n    ") << "[" << coords << ", " << json_integer(mp::numerator(n)) << ", "
         << json_integer(mp::denominator(n)) << ", " << json_integer(mp::numerator(c)) << ", "
         << json_integer(mp::denominator(c)) << "]";
      first = false;
    }
  }
  os << (first ? "]\n" : "\n  ]\n") << "}\n";
}

std::string series_to_string(const VVForm& f) {
  std::ostringstream os;
  write_series(os, f);
  return os.str();
}

VVForm series_from_json(const nlohmann::json& j) {
  try {
    const FqModule m = fqm_from_json(j.at("module"));
    VVForm f(m, rational_from_json(j.at("weight")), rational_from_json(j.at("trunc")));
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 5) throw InputError("series entry must have 5 fields");
      const FqElement x = m.reduce(e[0].get<std::vector<std::int64_t>>());
      const Rational n(integer_from_json(e[1]), integer_from_json(e[2]));
      const Rational c(integer_from_json(e[3]), integer_from_json(e[4]));
      f.add_to(m.index(x), n, c);
    }
    f.require_support();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed series file: ") + e.what());
  } catch (const ConsistencyError& e) {
    throw InputError(std::string("series file: ") + e.what());
  }
}

VVForm read_series(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("series file is not valid JSON: ") + e.what());
  }
  return series_from_json(j);
}

}  // namespace qpb
