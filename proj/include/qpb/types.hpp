#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <Eigen/Dense>

namespace qpb {

namespace mp = boost::multiprecision;

using Integer = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;
using IntVector = Vector<Integer>;
using RatVector = Vector<Rational>;

// Bad user input or a violated precondition. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An internal consistency check failed (the two sides of an identity disagree).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Integer mod(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += m;
  return r;
}

inline Integer floor(const Rational& x) {
  return floor_div(mp::numerator(x), mp::denominator(x));
}

inline Integer ceil(const Rational& x) { return -floor(-x); }

// Representative of x + Z in [0, 1).
inline Rational frac(const Rational& x) { return x - Rational(floor(x)); }

inline bool is_integer(const Rational& x) { return mp::denominator(x) == 1; }

inline Integer gcd(const Integer& a, const Integer& b) { return mp::gcd(a, b); }

inline Integer lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  return mp::abs(a / mp::gcd(a, b) * b);
}

inline std::string to_string(const Rational& x) { return x.str(); }
inline std::string to_string(const Integer& x) { return x.str(); }

// Accepts "a", "-a", "a/b".
Rational parse_rational(const std::string& text);

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

}  // namespace qpb
