#pragma once

#include <vector>

#include "qpb/lattice.hpp"
#include "qpb/qexp.hpp"

namespace qpb {

struct ShortVector {
  RatVector v;   // coordinates in the lattice basis
  Rational norm;  // (v, v)
};

/// Exact decomposition G = U^T D U with U unit upper triangular.
/// Throws InputError if G is not positive definite.
struct LdlForm {
  RatMatrix u;
  RatVector d;
};
LdlForm ldl_upper(const RatMatrix& gram);

/// All v in coset + Z^n with (v, v) <= bound, each once, sorted
/// lexicographically by coordinates. Fincke-Pohst with exact pruning.
std::vector<ShortVector> short_vectors(const EvenLattice& lattice, const RatVector& coset, const Rational& bound);

/// theta_{K + coset} known up to q^{n_max}.
ScalarQSeries theta_coset(const EvenLattice& lattice, const RatVector& coset, const Rational& n_max);

/// Theta_K over A_K (coordinates of the given discriminant form), weight rk(K)/2.
VVForm theta_vv(const DiscriminantForm& disc, const Rational& n_max);
inline VVForm theta_vv(const EvenLattice& lattice, const Rational& n_max) {
  return theta_vv(DiscriminantForm(lattice), n_max);
}

}  // namespace qpb
