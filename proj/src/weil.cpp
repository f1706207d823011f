#include "qpb/weil.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qpb {

SL2Matrix sl2_S() { return (SL2Matrix() << 0, -1, 1, 0).finished(); }
SL2Matrix sl2_T(std::int64_t k) { return (SL2Matrix() << 1, k, 0, 1).finished(); }

void require_sl2(const SL2Matrix& m) {
  if (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) != 1) throw InputError("matrix does not have determinant 1");
}

std::complex<double> mobius(const SL2Matrix& m, std::complex<double> tau) {
  return (static_cast<double>(m(0, 0)) * tau + static_cast<double>(m(0, 1))) /
         (static_cast<double>(m(1, 0)) * tau + static_cast<double>(m(1, 1)));
}

std::complex<double> e(double z) {
  const double t = 2 * std::numbers::pi * (z - std::floor(z));
  return {std::cos(t), std::sin(t)};
}

GroupWord GroupWord::S() { return GroupWord{{Syllable{true, 1}}}; }
GroupWord GroupWord::T(std::int64_t k) {
  if (k == 0) return {};
  return GroupWord{{Syllable{false, k}}};
}

SL2Matrix GroupWord::matrix() const {
  SL2Matrix m = SL2Matrix::Identity();
  for (const auto& l : letters) m = m * (l.is_s ? sl2_S() : sl2_T(l.power));
  return m;
}

GroupWord GroupWord::operator*(const GroupWord& other) const {
  GroupWord out = *this;
  for (const auto& l : other.letters) {
    if (!l.is_s && !out.letters.empty() && !out.letters.back().is_s) {
      out.letters.back().power += l.power;
      if (out.letters.back().power == 0) out.letters.pop_back();
    } else {
      out.letters.push_back(l);
    }
  }
  return out;
}

std::string GroupWord::str() const {
  if (letters.empty()) return "1";
  std::ostringstream os;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i) os << ' ';
    if (letters[i].is_s) os << 'S';
    else if (letters[i].power == 1) os << 'T';
    else os << "T^" << letters[i].power;
  }
  return os.str();
}

std::complex<double> GroupWord::sqrt_factor(std::complex<double> tau) const {
  std::complex<double> phi = 1;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    if (it->is_s) {
      phi *= std::sqrt(tau);
      tau = -1.0 / tau;
    } else {
      tau += static_cast<double>(it->power);
    }
  }
  return phi;
}

GroupWord word_decompose(const SL2Matrix& input) {
  require_sl2(input);
  SL2Matrix m = input;
  GroupWord w;
  while (m(1, 0) != 0) {
    // m = T^k S m' with m' = [[c, d], [kc - a, kd - b]].
    const std::int64_t a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    std::int64_t k = a / c;
    if ((a % c != 0) && ((a < 0) != (c < 0))) --k;  // floor
    w = w * GroupWord::T(k) * GroupWord::S();
    m << c, d, k * c - a, k * d - b;
  }
  if (m(0, 0) == 1) {
    w = w * GroupWord::T(m(0, 1));
  } else {
    // m = -T^{-b'}: -I = S^2.
    w = w * GroupWord::S() * GroupWord::S() * GroupWord::T(-m(0, 1));
  }
  return w;
}

WeilMatrix rho_T(const FqModule& a, std::int64_t k) {
  WeilMatrix t = WeilMatrix::Zero(a.size(), a.size());
  for (std::int64_t i = 0; i < a.size(); ++i) t(i, i) = e(to_double(frac(Rational(k) * a.q(a.element(i)))));
  return t;
}

WeilMatrix rho_S(const FqModule& a) {
  const int sigma = signature_mod8(a);
  const std::complex<double> c = e(-sigma / 8.0) / std::sqrt(static_cast<double>(a.size()));
  WeilMatrix s(a.size(), a.size());
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const FqElement x = a.element(i);
    for (std::int64_t j = 0; j <= i; ++j) {
      const std::complex<double> v = c * e(-to_double(a.bilinear(x, a.element(j))));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

WeilMatrix rho(const FqModule& a, const GroupWord& w) { return WeilRepresentation(a)(w); }

WeilRepresentation::WeilRepresentation(const FqModule& a)
    : a_(a), sigma_(signature_mod8(a)), level_(level(a)), q_(a.size()), s_(rho_S(a)) {
  for (std::int64_t i = 0; i < a.size(); ++i) q_(i) = to_double(a.q(a.element(i)));
}

WeilMatrix WeilRepresentation::T(std::int64_t k) const {
  WeilMatrix t = WeilMatrix::Zero(a_.size(), a_.size());
  // k q(lambda) only matters mod 1, so k can be reduced mod the level first
  const double kr = static_cast<double>(k % level_);
  for (std::int64_t i = 0; i < a_.size(); ++i) t(i, i) = e(q_(i) * kr);
  return t;
}

WeilMatrix WeilRepresentation::operator()(const GroupWord& w) const {
  WeilMatrix m = WeilMatrix::Identity(a_.size(), a_.size());
  for (const auto& l : w.letters) {
    if (l.is_s) {
      m = m * s_;
    } else {
      const double kr = static_cast<double>(l.power % level_);
      for (std::int64_t i = 0; i < a_.size(); ++i) m.col(i) *= e(q_(i) * kr);
    }
  }
  return m;
}

}  // namespace qpb
