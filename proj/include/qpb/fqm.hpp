#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qpb/types.hpp"

namespace qpb {

/// Element of a finite abelian group presented as a product of cyclic factors.
/// Coordinates are canonical residues 0 <= c_i < order_i.
struct FqElement {
  std::vector<std::int64_t> coords;

  auto operator<=>(const FqElement&) const = default;
};

struct Signature {
  int positive = 0;
  int negative = 0;
  auto operator<=>(const Signature&) const = default;
};

/// A finite quadratic module (A, q): cyclic factors Z/d_i with generators g_i,
/// q(g_i) and the bilinear values b(g_i, g_j), both reduced to [0, 1).
/// Values on arbitrary elements come from the polarization identity.
class FqModule {
 public:
  FqModule() = default;
  FqModule(std::vector<std::int64_t> orders, RatMatrix gram_mod1, std::vector<Rational> q_gen,
           std::optional<Signature> source_signature = std::nullopt);

  static FqModule trivial() { return FqModule({}, RatMatrix(0, 0), {}); }

  const std::vector<std::int64_t>& orders() const { return orders_; }
  const RatMatrix& gram_mod1() const { return gram_; }
  const std::vector<Rational>& q_gen() const { return q_gen_; }
  const std::optional<Signature>& source_signature() const { return source_signature_; }
  std::size_t num_generators() const { return orders_.size(); }

  /// |A|.
  std::int64_t size() const { return size_; }
  bool is_trivial() const { return size_ == 1; }

  /// Mixed-radix enumeration with the last coordinate varying fastest.
  FqElement element(std::int64_t index) const;
  std::int64_t index(const FqElement& x) const;
  FqElement zero() const { return FqElement{std::vector<std::int64_t>(orders_.size(), 0)}; }
  FqElement generator(std::size_t i) const;

  FqElement reduce(std::vector<std::int64_t> coords) const;
  FqElement reduce(const std::vector<Integer>& coords) const;
  FqElement add(const FqElement& x, const FqElement& y) const;
  FqElement negate(const FqElement& x) const;
  FqElement multiply(std::int64_t k, const FqElement& x) const;
  std::int64_t element_order(const FqElement& x) const;

  Rational q(const FqElement& x) const;
  Rational bilinear(const FqElement& x, const FqElement& y) const;

  /// Same group with q multiplied by -1 (A(-1)); coordinates are shared.
  FqModule negated() const;

  bool operator==(const FqModule& other) const;

  /// Throws InputError unless the bilinear form is nondegenerate.
  void require_nondegenerate() const;
  bool is_nondegenerate() const;

 private:
  std::vector<std::int64_t> orders_;
  RatMatrix gram_;
  std::vector<Rational> q_gen_;
  std::optional<Signature> source_signature_;
  std::int64_t size_ = 1;
};

FqModule direct_sum(const FqModule& a, const FqModule& b);
/// Index in a (+) b of the pair (x, y) given by their indices in the factors.
inline std::int64_t direct_sum_index(const FqModule& /*a*/, const FqModule& b, std::int64_t ia,
                                     std::int64_t ib) {
  return ia * b.size() + ib;
}

Rational q_value(const FqModule& a, const FqElement& x);
Rational bilinear(const FqModule& a, const FqElement& x, const FqElement& y);

/// Gauss sum sum_x e(q(x)), evaluated in double precision.
std::complex<double> gauss_sum(const FqModule& a);

/// sigma(A) in Z/8 from the Gauss sum; throws ConsistencyError if |sum| deviates
/// from sqrt|A| by more than 1e-8.
int signature_mod8(const FqModule& a);

/// Smallest d >= 1 with d q(x) = 0 for all x.
std::int64_t level(const FqModule& a);

/// Exponent of the group (lcm of the cyclic orders).
std::int64_t exponent(const FqModule& a);

/// All elements of the subgroup generated by `generators`, sorted.
std::vector<FqElement> subgroup_elements(const FqModule& a, const std::vector<FqElement>& generators);

struct IsotropicSubgroup {
  std::vector<FqElement> generators;
  std::vector<FqElement> elements;  // closure, sorted

  /// Throws InputError if q does not vanish on the generated subgroup.
  static IsotropicSubgroup generate(const FqModule& parent, std::vector<FqElement> generators);
  std::int64_t size() const { return static_cast<std::int64_t>(elements.size()); }
};

/// A = I^perp / I together with p: I^perp -> A, stored as a table on A'.
struct QuotientMap {
  FqModule cover;     // A'
  FqModule quotient;  // A
  IsotropicSubgroup isotropic;
  std::vector<std::int64_t> projection;  // index in A' -> index in A, or -1 outside I^perp

  bool in_perp(std::int64_t cover_index) const { return projection[cover_index] >= 0; }
  /// Elements of A' lying over lambda (an I-coset).
  std::vector<std::int64_t> fiber(std::int64_t quotient_index) const;

  /// Checks p is a surjective homomorphism with kernel I that preserves q.
  void validate() const;
};

QuotientMap perp_quotient(const FqModule& cover, const IsotropicSubgroup& isotropic);

/// Graph data of an isotropic subgroup I of A1 (+) A2: the projections G1, G2
/// and the isomorphism iota: G1 -> G2 whose graph is I.
struct GlueGraph {
  std::vector<FqElement> g1;
  std::vector<FqElement> g2;
  std::vector<std::pair<std::int64_t, std::int64_t>> iota;  // (index in A1, index in A2), sorted
};

/// Throws ConsistencyError if either projection of I is not injective.
GlueGraph extract_graph(const FqModule& a1, const FqModule& a2, const std::vector<FqElement>& isotropic);

nlohmann::json to_json(const FqModule& a);
FqModule fqm_from_json(const nlohmann::json& j);

}  // namespace qpb
