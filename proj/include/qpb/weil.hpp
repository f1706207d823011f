#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpb/fqm.hpp"

namespace qpb {

using SL2Matrix = Eigen::Matrix<std::int64_t, 2, 2>;
using WeilMatrix = Eigen::MatrixXcd;

SL2Matrix sl2_S();
SL2Matrix sl2_T(std::int64_t k = 1);
/// Throws InputError unless det = 1.
void require_sl2(const SL2Matrix& m);
std::complex<double> mobius(const SL2Matrix& m, std::complex<double> tau);

/// e(z) = exp(2 pi i z).
std::complex<double> e(double z);

/// A word in S and powers of T. The word itself is the element of Mp2(Z):
/// S carries the square root sqrt(tau) (principal branch), T^k carries 1.
struct GroupWord {
  struct Syllable {
    bool is_s = false;
    std::int64_t power = 1;  // exponent of T when !is_s
    bool operator==(const Syllable&) const = default;
  };
  std::vector<Syllable> letters;

  static GroupWord S();
  static GroupWord T(std::int64_t k = 1);

  SL2Matrix matrix() const;
  GroupWord operator*(const GroupWord& other) const;
  std::size_t length() const { return letters.size(); }
  std::string str() const;

  /// phi(tau) with (M, phi) the metaplectic element of this word.
  std::complex<double> sqrt_factor(std::complex<double> tau) const;
};

/// Continued-fraction reduction: m = T^{k1} S T^{k2} S ... ; throws InputError if det != 1.
GroupWord word_decompose(const SL2Matrix& m);

WeilMatrix rho_T(const FqModule& a, std::int64_t k = 1);
WeilMatrix rho_S(const FqModule& a);
/// Product of generator matrices in word order. Entry (lambda, mu) is the
/// e_lambda coefficient of rho(w) e_mu.
WeilMatrix rho(const FqModule& a, const GroupWord& w);

/// Weil matrices with the Gauss-sum signature cached, for repeated use.
class WeilRepresentation {
 public:
  explicit WeilRepresentation(const FqModule& a);
  const FqModule& module() const { return a_; }
  int signature() const { return sigma_; }
  const WeilMatrix& S() const { return s_; }
  WeilMatrix T(std::int64_t k = 1) const;
  WeilMatrix operator()(const GroupWord& w) const;

 private:
  FqModule a_;
  int sigma_ = 0;
  std::int64_t level_ = 1;
  Eigen::VectorXd q_;  // q(lambda) in [0,1)
  WeilMatrix s_;
};

}  // namespace qpb
