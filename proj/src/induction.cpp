#include "qpb/induction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "qpb/theta.hpp"

namespace qpb {

namespace {

// x a + y b = g > 0
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    old_r -= q * r;
    std::swap(old_r, r);
    old_s -= q * s;
    std::swap(old_s, s);
    old_t -= q * t;
    std::swap(old_t, t);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  x = old_s;
  y = old_t;
  return old_r;
}

std::int64_t mod64(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

double to_d(const Rational& x) { return to_double(x); }

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void cut(SlashedSlice& s, const Rational& t) {
  s.trunc = std::min(s.trunc, t);
  while (!s.coeffs.empty() && s.coeffs.rbegin()->first > s.trunc) s.coeffs.erase(std::prev(s.coeffs.end()));
  while (!s.envelope.empty() && s.envelope.rbegin()->first > s.trunc) s.envelope.erase(std::prev(s.envelope.end()));
}

void rescale(SlashedSlice& s, std::complex<double> c) {
  for (auto& [x, v] : s.coeffs) v *= c;
  for (auto& [x, v] : s.envelope) v *= std::abs(c);
}

Rational valuation(const SlashedSlice& s) { return s.coeffs.empty() ? s.trunc : s.coeffs.begin()->first; }

// ((x)): sawtooth
Rational sawtooth(const Rational& x) {
  if (is_integer(x)) return 0;
  return x - Rational(floor(x)) - Rational(1, 2);
}

SlashedSlice power(const SlashedSlice& s, int p) {
  SlashedSlice out = s;
  for (int i = 1; i < p; ++i) out = out * s;
  return out;
}

}  // namespace

Rational EtaQuotient::weight() const {
  std::int64_t sum = 0;
  for (const auto& [delta, r] : exponents) sum += r;
  return Rational(sum, 2);
}

Rational EtaQuotient::leading_exponent() const {
  std::int64_t sum = 0;
  for (const auto& [delta, r] : exponents) sum += delta * r;
  return Rational(sum, 24);
}

std::int64_t EtaQuotient::level() const {
  std::int64_t l = 1;
  for (const auto& [delta, r] : exponents) l = std::lcm(l, delta);
  return l;
}

std::string EtaQuotient::str() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [delta, r] : exponents) {
    if (!first) os << ',';
    first = false;
    os << delta << ':' << r;
  }
  os << '}';
  return os.str();
}

EtaQuotient parse_eta(const std::string& text) {
  EtaQuotient e;
  std::string body = text;
  body.erase(std::remove_if(body.begin(), body.end(), [](unsigned char ch) { return std::isspace(ch); }), body.end());
  if (!body.empty() && body.front() == '{') {
    if (body.back() != '}') throw InputError("eta quotient: unbalanced braces in '" + text + "'");
    body = body.substr(1, body.size() - 2);
  }
  if (body.empty()) return e;
  static const std::regex item(R"((\d+):([+-]?\d+))");
  std::stringstream ss(body);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::smatch m;
    if (!std::regex_match(part, m, item)) throw InputError("eta quotient: cannot parse '" + part + "'");
    const std::int64_t delta = std::stoll(m[1]);
    if (delta < 1) throw InputError("eta quotient: delta must be positive");
    e.exponents[delta] += std::stoll(m[2]);
    if (e.exponents[delta] == 0) e.exponents.erase(delta);
  }
  return e;
}

ScalarQSeries eta_expand(const EtaQuotient& e, const Rational& n_max) {
  const Rational v = e.leading_exponent();
  ScalarQSeries s(static_cast<std::int64_t>(mp::denominator(v)), n_max);
  if (n_max < v) return s;
  const std::int64_t len = static_cast<std::int64_t>(floor(n_max - v)) + 1;
  std::vector<Integer> a(len, 0);
  a[0] = 1;
  for (const auto& [delta, r] : e.exponents) {
    for (std::int64_t m = delta; m < len; m += delta) {
      for (std::int64_t t = 0; t < std::abs(r); ++t) {
        if (r > 0) {
          for (std::int64_t i = len - 1; i >= m; --i) a[i] -= a[i - m];
        } else {
          for (std::int64_t i = m; i < len; ++i) a[i] += a[i - m];
        }
      }
    }
  }
  for (std::int64_t i = 0; i < len; ++i)
    if (a[i] != 0) s.set(v + i, Rational(a[i]));
  return s;
}

std::int64_t SlashedSlice::denom() const {
  std::int64_t n = 1;
  for (const auto& [x, c] : coeffs) n = std::lcm(n, static_cast<std::int64_t>(mp::denominator(x)));
  return n;
}

std::complex<double> SlashedSlice::operator()(std::complex<double> tau) const {
  std::complex<double> s = 0;
  for (const auto& [x, c] : coeffs) s += c * std::exp(std::complex<double>(0, 2 * std::numbers::pi * to_d(x)) * tau);
  return s;
}

void SlashedSlice::set(const Rational& n, std::complex<double> c) {
  coeffs[n] = c;
  envelope[n] = std::abs(c);
}

double SlashedSlice::scale_at(const Rational& n) const {
  const auto it = envelope.find(n);
  return it == envelope.end() ? 0.0 : it->second;
}

void SlashedSlice::add(const SlashedSlice& other, std::complex<double> scale) {
  trunc = std::min(trunc, other.trunc);
  for (const auto& [x, c] : other.coeffs) {
    if (x > trunc) break;
    coeffs[x] += scale * c;
    envelope[x] += std::abs(scale) * other.scale_at(x);
  }
  cut(*this, trunc);
}

SlashedSlice SlashedSlice::from_series(const ScalarQSeries& s, const Rational& weight) {
  SlashedSlice out;
  out.weight = weight;
  out.trunc = s.trunc();
  for (const auto& [key, c] : s.terms()) out.set(s.exponent(key), to_d(c));
  return out;
}

SlashedSlice operator*(const SlashedSlice& a, const SlashedSlice& b) {
  SlashedSlice out;
  out.weight = a.weight + b.weight;
  out.trunc = std::min(a.trunc + valuation(b), b.trunc + valuation(a));
  for (const auto& [x, c] : a.coeffs) {
    for (const auto& [y, d] : b.coeffs) {
      const Rational z = x + y;
      if (z > out.trunc) break;
      out.coeffs[z] += c * d;
      out.envelope[z] += a.scale_at(x) * b.scale_at(y);
    }
  }
  return out;
}

Rational ScalarInput::weight() const {
  Rational k = eta.weight();
  for (const auto& t : thetas) k += Rational(t.lattice.rank() * t.power, 2);
  return k;
}

ScalarQSeries ScalarInput::expand(const Rational& n_max) const {
  const Rational v = eta.leading_exponent();
  ScalarQSeries s = eta_expand(eta, n_max);
  for (const auto& t : thetas) {
    const VVForm th = theta_vv(t.lattice, n_max - std::min(v, Rational(0)));
    for (int i = 0; i < t.power; ++i) s = s * th.component(t.coset);
  }
  return s.truncated(n_max);
}

namespace {

// Splits at top-level occurrences of any char in seps.
std::vector<std::string> split_top(const std::string& text, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : text) {
    if (ch == '(' || ch == '{' || ch == '[') ++depth;
    if (ch == ')' || ch == '}' || ch == ']') --depth;
    if (depth == 0 && seps.find(ch) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
      continue;
    }
    cur += ch;
  }
  if (depth != 0) throw InputError("unbalanced brackets in '" + text + "'");
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::int64_t parse_int(const std::string& s) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InputError("expected an integer, got '" + s + "'");
  return v;
}

std::string strip_braces(const std::string& s) {
  if (s.size() < 2 || s.front() != '{' || s.back() != '}') throw InputError("expected {...}, got '" + s + "'");
  return s.substr(1, s.size() - 2);
}

}  // namespace

ScalarInput parse_scalar_input(const std::string& text) {
  ScalarInput phi;
  for (const auto& frag : split_top(text, " ;\t\n")) {
    const auto colon = frag.find(':');
    if (colon == std::string::npos) throw InputError("scalar form fragment without ':' in '" + frag + "'");
    const std::string key = frag.substr(0, colon), body = frag.substr(colon + 1);
    if (key == "eta") {
      for (const auto& [delta, r] : parse_eta(body).exponents) {
        phi.eta.exponents[delta] += r;
        if (phi.eta.exponents[delta] == 0) phi.eta.exponents.erase(delta);
      }
    } else if (key == "theta_pow") {
      ThetaPower t;
      bool have_lattice = false;
      for (const auto& item : split_top(strip_braces(body), ",")) {
        const auto c = item.find(':');
        if (c == std::string::npos) throw InputError("theta_pow entry without ':' in '" + item + "'");
        const std::string k = item.substr(0, c), v = item.substr(c + 1);
        if (k == "lattice") {
          t.lattice = parse_lattice_expression(v);
          have_lattice = true;
        } else if (k == "power") {
          t.power = static_cast<int>(parse_int(v));
        } else if (k == "coset") {
          t.coset = parse_int(v);
        } else {
          throw InputError("unknown theta_pow key '" + k + "'");
        }
      }
      if (!have_lattice) throw InputError("theta_pow needs a lattice");
      phi.thetas.push_back(t);
    } else {
      throw InputError("unknown scalar form fragment '" + key + "'");
    }
  }
  for (const auto& t : phi.thetas) {
    if (t.power < 0) throw InputError("theta powers must be >= 0");
    if (t.lattice.signature().negative != 0) throw InputError("theta_pow lattice must be positive definite");
    if (t.coset < 0 || t.coset >= discriminant_module(t.lattice).size()) throw InputError("theta_pow coset out of range");
  }
  return phi;
}

ScalarInput scalar_input_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_scalar_input(j.get<std::string>());
  if (!j.is_object()) throw InputError("scalar form must be a string or an object");
  std::string text;
  if (j.contains("eta")) {
    const auto& e = j.at("eta");
    if (e.is_string()) {
      text += "eta:{" + (e.get<std::string>().front() == '{' ? strip_braces(e.get<std::string>()) : e.get<std::string>()) + "} ";
    } else {
      text += "eta:{";
      bool first = true;
      for (const auto& [k, v] : e.items()) {
        text += (first ? "" : ",") + k + ":" + std::to_string(v.get<long long>());
        first = false;
      }
      text += "} ";
    }
  }
  if (j.contains("theta_pow")) {
    for (const auto& t : j.at("theta_pow")) {
      text += "theta_pow:{lattice:" + t.at("lattice").get<std::string>() + ",power:" +
              std::to_string(t.value("power", 1)) + ",coset:" + std::to_string(t.value("coset", 0)) + "} ";
    }
  }
  return parse_scalar_input(text);
}

std::string to_string(const ScalarInput& phi) {
  std::string s = "eta:" + phi.eta.str();
  for (const auto& t : phi.thetas)
    s += " theta_pow:{lattice:" + (t.lattice.name().empty() ? std::string("?") : t.lattice.name()) +
         ",power:" + std::to_string(t.power) + ",coset:" + std::to_string(t.coset) + "}";
  return s;
}

std::int64_t gamma0_index(std::int64_t d) {
  if (d < 1) throw InputError("level must be positive");
  Rational idx = d;
  std::int64_t n = d;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    idx *= Rational(p + 1, p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) idx *= Rational(n + 1, n);
  return static_cast<std::int64_t>(mp::numerator(idx));
}

bool same_gamma0_coset(const SL2Matrix& a, const SL2Matrix& b, std::int64_t d) {
  // lower-left entry of a b^{-1}
  return mod64(a(1, 0) * b(1, 1) - a(1, 1) * b(1, 0), d) == 0;
}

std::vector<SL2Matrix> coset_reps_gamma0(std::int64_t d) {
  if (d < 1) throw InputError("level must be positive");
  std::vector<std::int64_t> units;
  for (std::int64_t u = 1; u <= d; ++u)
    if (std::gcd(u, d) == 1) units.push_back(u % d);
  std::set<std::pair<std::int64_t, std::int64_t>> points;
  for (std::int64_t c = 0; c < d; ++c) {
    for (std::int64_t dd = 0; dd < d; ++dd) {
      if (std::gcd(std::gcd(c, dd), d) != 1) continue;
      std::pair<std::int64_t, std::int64_t> best{d, d};
      for (auto u : units) best = std::min(best, {(u * c) % d, (u * dd) % d});
      points.insert(best);
    }
  }
  std::vector<SL2Matrix> out;
  for (auto [c, dd] : points) {
    SL2Matrix m;
    if (c == 0) {
      m = SL2Matrix::Identity();
    } else {
      std::int64_t lift = dd == 0 ? d : dd;
      while (std::gcd(c, lift) != 1) lift += d;
      std::int64_t x, y;
      ext_gcd(lift, c, x, y);  // x lift + y c = 1
      m << x, -y, c, lift;
    }
    out.push_back(m);
  }
  if (static_cast<std::int64_t>(out.size()) != gamma0_index(d))
    throw ConsistencyError("coset enumeration for Gamma_0(" + std::to_string(d) + ") is incomplete");
  return out;
}

Rational dedekind_sum(std::int64_t h, std::int64_t k) {
  if (k < 1) throw InputError("dedekind_sum needs k > 0");
  Rational s = 0;
  for (std::int64_t r = 1; r < k; ++r) s += sawtooth(Rational(r, k)) * sawtooth(Rational(h * r, k));
  return s;
}

std::complex<double> eta_multiplier(const SL2Matrix& m) {
  require_sl2(m);
  if (m(1, 0) <= 0) throw InputError("eta_multiplier needs c > 0");
  const std::int64_t a = m(0, 0), c = m(1, 0), d = m(1, 1);
  const Rational phase = Rational(a + d, 12 * c) - dedekind_sum(d, c);
  return std::exp(std::complex<double>(0, std::numbers::pi * to_d(phase)));
}

SlashedSlice slash_eta(const EtaQuotient& eq, const GroupWord& w, const Rational& trunc) {
  const SL2Matrix m = w.matrix();
  const std::int64_t a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const std::complex<double> i(0, 1);

  struct Factor {
    std::int64_t r, A, B, D;
    Rational val;
  };
  std::vector<Factor> factors;
  std::complex<double> constant = 1;
  for (const auto& [delta, r] : eq.exponents) {
    // diag(delta, 1) m = g' [[A, B], [0, D]]
    std::int64_t x, y;
    const std::int64_t g = ext_gcd(delta * a, c, x, y);
    const std::int64_t A = g, B = x * delta * b + y * d, D = delta / g;
    SL2Matrix gp;
    gp << delta * a / g, -y, c / g, x;
    if (gp(1, 0) < 0 || (gp(1, 0) == 0 && gp(1, 1) < 0)) gp = -gp;
    const std::complex<double> tau0 = (static_cast<double>(A) * i + static_cast<double>(B)) / static_cast<double>(D);
    std::complex<double> mult;
    if (gp(1, 0) == 0) {
      mult = e(static_cast<double>(gp(0, 1)) / 24.0);
    } else {
      mult = eta_multiplier(gp) *
             std::sqrt(-i * (static_cast<double>(gp(1, 0)) * tau0 + static_cast<double>(gp(1, 1))));
    }
    constant *= std::pow(mult, static_cast<int>(r));
    factors.push_back({r, A, B, D, Rational(r * A, 24 * D)});
  }
  std::int64_t two_k = 0;
  for (const auto& f : factors) two_k += f.r;
  constant *= std::pow(w.sqrt_factor(i), static_cast<int>(-two_k));

  Rational total_val = 0;
  for (const auto& f : factors) total_val += f.val;

  std::optional<SlashedSlice> prod;
  for (const auto& f : factors) {
    const Rational t = trunc - (total_val - f.val);  // exponent bound for this factor
    // eta(tau)^r up to n with n A / D <= t
    EtaQuotient single;
    single.exponents[1] = f.r;
    const ScalarQSeries s = eta_expand(single, t * f.D / f.A);
    SlashedSlice part;
    part.weight = Rational(f.r, 2);
    part.trunc = t;
    for (const auto& [key, coef] : s.terms()) {
      const Rational n = s.exponent(key);
      part.set(n * f.A / f.D, to_d(coef) * e(to_d(frac(n * f.B / f.D))));
    }
    prod = prod ? *prod * part : part;
  }
  SlashedSlice out;
  if (prod) {
    out = *prod;
    rescale(out, constant);
  } else {
    out.trunc = trunc;
    out.set(Rational(0), constant);
  }
  out.weight = eq.weight();
  cut(out, trunc);
  return out;
}

SlashedSlice slash_theta_coset(const DiscriminantForm& k, std::int64_t lambda, const GroupWord& w,
                               const Rational& trunc) {
  const FqModule& ak = k.module();
  const WeilMatrix r = rho(ak, w);
  SlashedSlice out;
  out.weight = Rational(k.lattice().rank(), 2);
  out.trunc = trunc;
  if (trunc < 0) return out;
  const VVForm th = theta_vv(k, trunc);
  for (std::int64_t nu = 0; nu < ak.size(); ++nu) {
    const std::complex<double> coef = r(lambda, nu);
    if (std::abs(coef) < 1e-15) continue;
    out.add(SlashedSlice::from_series(th.component(nu), out.weight), coef);
  }
  return out;
}

SlashedSlice slash_input(const ScalarInput& phi, const GroupWord& w, const Rational& trunc) {
  SlashedSlice out = slash_eta(phi.eta, w, trunc);
  const Rational v = std::min(valuation(out), Rational(0));
  for (const auto& t : phi.thetas) {
    if (t.power <= 0) continue;
    const DiscriminantForm dk(t.lattice);
    out = out * power(slash_theta_coset(dk, t.coset, w, trunc - v), t.power);
  }
  out.weight = phi.weight();
  cut(out, trunc);
  return out;
}

ComplexForm induce_on_vector(const FqModule& a, const std::vector<std::int64_t>& support, const ScalarInput& psi,
                             const std::vector<SL2Matrix>& reps, const Rational& n_max) {
  const WeilRepresentation weil(a);
  ComplexForm out{a, {}};
  SlashedSlice empty;
  empty.weight = psi.weight();
  empty.trunc = n_max;
  out.comps.assign(a.size(), empty);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(a.size());
  for (auto s : support) v(s) += 1.0;
  for (const auto& m : reps) {
    const GroupWord w = word_decompose(m);
    const SlashedSlice slice = slash_input(psi, w, n_max);
    const Eigen::VectorXcd u = weil(w).adjoint() * v;
    for (std::int64_t lam = 0; lam < a.size(); ++lam)
      if (std::abs(u(lam)) > 1e-14) out.comps[lam].add(slice, u(lam));
  }
  return out;
}

ComplexForm induce_mu(const FqModule& m, std::int64_t mu, const ScalarInput& psi, const std::vector<SL2Matrix>& reps,
                      const Rational& n_max) {
  return induce_on_vector(m, {mu}, psi, reps, n_max);
}

Rational nearest_rational(double x, std::int64_t max_denominator) {
  if (!std::isfinite(x)) throw RationalizationFailure("coefficient is not finite");
  if (std::abs(x) > 9e15) throw RationalizationFailure("coefficient too large to rationalize");
  const bool negative = x < 0;
  double t = std::abs(x);
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  bool exact = false;
  for (int iter = 0; iter < 64; ++iter) {
    const double af = std::floor(t);
    const std::int64_t a = static_cast<std::int64_t>(af);
    const std::int64_t q2 = q0 + a * q1;
    if (q2 > max_denominator) break;
    const std::int64_t p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double rem = t - af;
    if (rem < 1e-12) {
      exact = true;
      break;
    }
    t = 1.0 / rem;
  }
  Rational best(p1, q1);
  if (!exact) {
    const std::int64_t k = (max_denominator - q0) / q1;
    const Rational other(p0 + k * p1, q0 + k * q1);
    if (std::abs(to_d(other) - std::abs(x)) < std::abs(to_d(best) - std::abs(x))) best = other;
  }
  return negative ? Rational(-best) : best;
}

Rationalized rationalize(const ComplexForm& f, const Rational& weight, const Rational& n_max, std::int64_t bound,
                         double tolerance) {
  Rationalized out{VVForm(f.module, weight, n_max), 0};
  for (std::int64_t lam = 0; lam < f.module.size(); ++lam) {
    const Rational q = f.module.q(f.module.element(lam));
    for (const auto& [n, c] : f.comps[lam].coeffs) {
      if (n > n_max) continue;
      const double scale = std::max(1.0, f.comps[lam].scale_at(n));
      const double tol = tolerance * scale;
      if (!is_integer(n - q)) {
        if (std::abs(c) > tol)
          throw RationalizationFailure("component " + std::to_string(lam) + " has coefficient " +
                                       num(std::abs(c)) + " at q^" + n.str() + ", off q(lambda) + Z");
        out.residual = std::max(out.residual, std::abs(c) / scale);
        continue;
      }
      if (std::abs(c.imag()) > tol)
        throw RationalizationFailure("component " + std::to_string(lam) + " at q^" + n.str() +
                                     " has imaginary part " + num(c.imag()));
      const Rational r = nearest_rational(c.real(), bound);
      const double err = std::abs(c.real() - to_d(r));
      if (err > tol)
        throw RationalizationFailure("component " + std::to_string(lam) + " at q^" + n.str() + ": " +
                                     num(c.real()) + " is not within tolerance of a rational with denominator <= " +
                                     std::to_string(bound));
      out.residual = std::max({out.residual, err / scale, std::abs(c.imag()) / scale});
      if (r != 0) out.form.add_to(lam, n, r);
    }
  }
  return out;
}

std::vector<SL2Matrix> random_transversal(const std::vector<SL2Matrix>& reps, std::int64_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(2, 5), pick(0, 5);
  std::vector<std::int64_t> units;
  for (std::int64_t v = 1; v < std::max<std::int64_t>(d, 2); ++v)
    if (std::gcd(v, d) == 1) units.push_back(v);
  std::uniform_int_distribution<std::size_t> unit(0, units.size() - 1);
  std::vector<SL2Matrix> gens(5);
  gens[0] << 1, 1, 0, 1;
  gens[1] << 1, -1, 0, 1;
  gens[2] << 1, 0, d, 1;
  gens[3] << 1, 0, -d, 1;
  gens[4] << -1, 0, 0, -1;
  std::vector<SL2Matrix> out;
  for (const auto& m : reps) {
    SL2Matrix h = SL2Matrix::Identity();
    const int len = length(rng);
    for (int i = 0; i < len; ++i) {
      const int g = pick(rng);
      if (g < 5) {
        h = h * gens[g];
        continue;
      }
      // [[x, -y], [d, v]] with lower-right entry a random unit mod d
      const std::int64_t v = units[unit(rng)];
      std::int64_t x, y;
      ext_gcd(v, d, x, y);
      SL2Matrix g5;
      g5 << x, -y, d, v;
      h = h * g5;
    }
    out.push_back(h * m);
  }
  return out;
}

InduceResult induce(const FqModule& a, const IsotropicSubgroup& isotropic, const ScalarInput& phi,
                    const Rational& n_max, const InduceOptions& options) {
  const std::int64_t lvl = level(a);
  const std::int64_t d = options.d == 0 ? lvl : options.d;
  if (d % lvl != 0)
    throw InputError("d = " + std::to_string(d) + " is not a multiple of the level " + std::to_string(lvl));
  std::vector<std::int64_t> support;
  for (const auto& x : isotropic.elements) support.push_back(a.index(x));

  const std::vector<SL2Matrix> reps = coset_reps_gamma0(d);
  const ComplexForm cf = induce_on_vector(a, support, phi, reps, n_max);
  InduceResult res;
  res.d = d;
  res.cosets = reps.size();
  if (options.check_independence) {
    const ComplexForm alt = induce_on_vector(a, support, phi, random_transversal(reps, d, options.seed), n_max);
    for (std::int64_t lam = 0; lam < a.size(); ++lam) {
      std::map<Rational, std::pair<std::complex<double>, std::complex<double>>> both;
      for (const auto& [n, c] : cf.comps[lam].coeffs) both[n].first = c;
      for (const auto& [n, c] : alt.comps[lam].coeffs) both[n].second = c;
      for (const auto& [n, pr] : both) {
        const double scale =
            std::max({1.0, cf.comps[lam].scale_at(n), alt.comps[lam].scale_at(n)});
        const double diff = std::abs(pr.first - pr.second);
        res.dependence = std::max(res.dependence, diff / scale);
        if (diff > options.tolerance * scale)
          throw RepresentativeDependence("induction depends on the coset representatives: component " +
                                         std::to_string(lam) + " at q^" + n.str() + " moves by " +
                                         num(diff) + "; phi does not transform with the character of A");
      }
    }
  }
  const Rationalized r = rationalize(cf, phi.weight(), n_max, 24 * d * a.size(), options.tolerance);
  res.form = r.form;
  res.residual = r.residual;
  return res;
}

}  // namespace qpb
