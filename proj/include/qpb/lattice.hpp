#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpb/fqm.hpp"
#include "qpb/types.hpp"

namespace qpb {

/// Even lattice given by its Gram matrix in a fixed basis.
class EvenLattice {
 public:
  EvenLattice() = default;
  /// Throws InputError unless gram is square, symmetric, even and nondegenerate.
  explicit EvenLattice(IntMatrix gram, std::string name = {});

  const IntMatrix& gram() const { return gram_; }
  const RatMatrix& rational_gram() const { return gram_q_; }
  Eigen::Index rank() const { return gram_.rows(); }
  const Signature& signature() const { return signature_; }
  const std::string& name() const { return name_; }
  const Integer& determinant() const { return det_; }

  bool is_positive_definite() const { return signature_.negative == 0; }
  bool is_negative_definite() const { return signature_.positive == 0; }

  Integer pairing(const IntVector& x, const IntVector& y) const { return x.dot(gram_ * y); }
  Rational pairing(const RatVector& x, const RatVector& y) const;
  /// (x, x) / 2.
  Rational q(const RatVector& x) const { return pairing(x, x) / 2; }

  /// Same module with the pairing multiplied by s.
  EvenLattice scaled(const Integer& s) const;

 private:
  IntMatrix gram_;
  RatMatrix gram_q_;
  std::string name_;
  Signature signature_;
  Integer det_ = 1;
};

EvenLattice orthogonal_sum(const std::vector<EvenLattice>& parts, std::string name = {});

/// Sublattice spanned by the rows of `basis` (coordinates in the ambient basis).
struct Sublattice {
  EvenLattice ambient;
  IntMatrix basis;

  Sublattice() = default;
  Sublattice(EvenLattice ambient, IntMatrix basis);
  Eigen::Index rank() const { return basis.rows(); }
  IntMatrix induced_gram() const { return basis * ambient.gram() * basis.transpose(); }
  EvenLattice induced(std::string name = {}) const { return EvenLattice(induced_gram(), std::move(name)); }
  bool is_primitive() const;
};

/// A_L = L^v / L together with the coordinate maps.
/// Elements of L^v are given by rational coordinates x in the basis of L (G x integral).
class DiscriminantForm {
 public:
  DiscriminantForm() = default;
  explicit DiscriminantForm(const EvenLattice& lattice);

  const FqModule& module() const { return module_; }
  const EvenLattice& lattice() const { return lattice_; }

  bool in_dual(const RatVector& x) const;
  /// Class of x in A_L; throws InputError if x is not in L^v.
  FqElement project(const RatVector& x) const;
  /// Canonical representative in L^v of an element.
  RatVector lift(const FqElement& a) const;
  /// Representatives of the generators (columns).
  const RatMatrix& generator_lifts() const { return lifts_; }

  /// Discriminant form of L(-1) sharing the coordinates of this one.
  DiscriminantForm negated() const;

 private:
  EvenLattice lattice_;
  FqModule module_;
  IntMatrix to_snf_;    // U G; z = U G x
  std::vector<Eigen::Index> kept_;  // SNF positions with d > 1
  RatMatrix lifts_;     // n x k
};

DiscriminantForm discriminant_form(const EvenLattice& lattice);
inline FqModule discriminant_module(const EvenLattice& lattice) { return DiscriminantForm(lattice).module(); }

/// Saturated complement of S in L; throws InputError if S is degenerate.
Sublattice orthogonal_complement(const EvenLattice& lattice, const Sublattice& s);

struct EmbeddingData {
  EvenLattice L;
  Sublattice K_neg;         // K(-1) inside L
  Sublattice M;             // K(-1)^perp in L
  EvenLattice M_lattice;    // Gram of M in the basis M.basis
  EvenLattice K_lattice;    // K, positive definite, basis K_neg.basis
  EvenLattice K_neg_lattice;
  EvenLattice L_prime;      // M (+) K(-1)
  Integer index = 1;        // [L : L']
  IntMatrix change_of_basis;  // rows: M basis then K basis, in L coordinates

  DiscriminantForm disc_L;
  DiscriminantForm disc_M;
  DiscriminantForm disc_K;      // A_K; A_{K(-1)} is disc_K.negated() in the same coordinates
  DiscriminantForm disc_K_neg;
  FqModule A_L_prime;           // A_M (+) A_{K(-1)}
  IsotropicSubgroup glue;       // I = L / L'
  QuotientMap to_L;             // p: I^perp -> A_L
  GlueGraph graph;              // G_M, G_K, iota

  std::vector<std::string> warnings;
  bool witt_unverified = false;  // rank(M) <= 4 and not asserted

  /// Index of (a, b) in A_{L'} from indices in A_M and A_{K(-1)}.
  std::int64_t pair_index(std::int64_t im, std::int64_t ik) const { return im * disc_K.module().size() + ik; }
  /// Class in A_L of x in L'^v given by coordinates in the basis of L'.
  RatVector to_L_coords(const RatVector& lprime_coords) const;
};

/// Builds M, L' = M (+) K(-1), the glue group and the graph data.
/// Throws InputError if K is not primitive or not negative definite.
EmbeddingData build_embedding(const EvenLattice& lattice, const IntMatrix& k_basis, bool assert_witt = false);

/// Checks the invariants of EmbeddingData; throws ConsistencyError on failure.
void validate_embedding(const EmbeddingData& emb);

namespace lattices {
EvenLattice U();
EvenLattice E8();
EvenLattice E7();
EvenLattice A1();
EvenLattice II_2_26();
}  // namespace lattices

/// Parses "U", "E8", "E7", "A1", "II_2_26", "<n>", "scale(X,s)", "sum(X,Y,...)".
EvenLattice parse_lattice_expression(const std::string& text);

struct LatticeDefinition {
  EvenLattice lattice;
  std::map<std::string, IntMatrix> sublattices;
};

/// A string expression, or {"name", "gram", "sublattices"}.
LatticeDefinition lattice_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EvenLattice& lattice);

/// Array of integer rows, or {"unit_rows": [i, ...]} selecting standard basis vectors of Z^cols.
IntMatrix int_matrix_from_json(const nlohmann::json& j, Eigen::Index cols = -1);
nlohmann::json to_json(const IntMatrix& m);

}  // namespace qpb
