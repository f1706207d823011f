#include "qpb/fqm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "qpb/integer_matrix.hpp"

namespace qpb {

namespace {

std::int64_t to_i64(const Integer& x) { return x.convert_to<std::int64_t>(); }

// Basis (rows) of {x in Z^k : b(x, h) in Z for all h in gens}.
IntMatrix perp_lattice(const FqModule& a, const std::vector<FqElement>& gens) {
  const auto k = static_cast<Eigen::Index>(a.num_generators());
  if (gens.empty()) return IntMatrix::Identity(k, k);
  Integer n = 1;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) n = lcm(n, mp::denominator(a.gram_mod1()(i, j)));
  const auto m = static_cast<Eigen::Index>(gens.size());
  // Condition: sum_i x_i c_{i,l} = 0 mod n for every generator l.
  IntMatrix e = IntMatrix::Zero(m, k + m);
  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index i = 0; i < k; ++i) {
      Rational s = 0;
      for (Eigen::Index j = 0; j < k; ++j) s += a.gram_mod1()(i, j) * Rational(gens[l].coords[j]);
      e(l, i) = mp::numerator(s * Rational(n));  // s * n is an integer
    }
    e(l, k + l) = n;
  }
  const IntMatrix kernel = integer_kernel(e);
  return row_basis(IntMatrix(kernel.leftCols(k)));
}

}  // namespace

FqModule::FqModule(std::vector<std::int64_t> orders, RatMatrix gram_mod1, std::vector<Rational> q_gen,
                   std::optional<Signature> source_signature)
    : orders_(std::move(orders)),
      gram_(std::move(gram_mod1)),
      q_gen_(std::move(q_gen)),
      source_signature_(source_signature) {
  const auto k = static_cast<Eigen::Index>(orders_.size());
  if (gram_.rows() != k || gram_.cols() != k || static_cast<Eigen::Index>(q_gen_.size()) != k)
    throw InputError("finite quadratic module: inconsistent dimensions");
  size_ = 1;
  for (auto d : orders_) {
    if (d < 1) throw InputError("finite quadratic module: cyclic orders must be positive");
    if (size_ > (std::int64_t{1} << 40) / d) throw InputError("finite quadratic module too large");
    size_ *= d;
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    q_gen_[i] = frac(q_gen_[i]);
    for (Eigen::Index j = 0; j < k; ++j) gram_(i, j) = frac(gram_(i, j));
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    const Rational d = orders_[i];
    if (frac(2 * q_gen_[i]) != gram_(i, i))
      throw InputError("finite quadratic module: b(g,g) != 2 q(g) for generator " + std::to_string(i));
    if (!is_integer(d * d * q_gen_[i]))
      throw InputError("finite quadratic module: q is not well defined on generator " + std::to_string(i));
    for (Eigen::Index j = 0; j < k; ++j) {
      if (gram_(i, j) != gram_(j, i)) throw InputError("finite quadratic module: bilinear form not symmetric");
      if (!is_integer(d * gram_(i, j)))
        throw InputError("finite quadratic module: bilinear form not well defined");
    }
  }
}

FqElement FqModule::element(std::int64_t index) const {
  FqElement x{std::vector<std::int64_t>(orders_.size(), 0)};
  for (std::size_t i = orders_.size(); i-- > 0;) {
    x.coords[i] = index % orders_[i];
    index /= orders_[i];
  }
  return x;
}

std::int64_t FqModule::index(const FqElement& x) const {
  std::int64_t idx = 0;
  for (std::size_t i = 0; i < orders_.size(); ++i) idx = idx * orders_[i] + x.coords[i];
  return idx;
}

FqElement FqModule::generator(std::size_t i) const {
  FqElement g = zero();
  g.coords[i] = 1 % orders_[i];
  return g;
}

FqElement FqModule::reduce(std::vector<std::int64_t> coords) const {
  if (coords.size() != orders_.size()) throw InputError("element has the wrong number of coordinates");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    coords[i] %= orders_[i];
    if (coords[i] < 0) coords[i] += orders_[i];
  }
  return FqElement{std::move(coords)};
}

FqElement FqModule::reduce(const std::vector<Integer>& coords) const {
  if (coords.size() != orders_.size()) throw InputError("element has the wrong number of coordinates");
  std::vector<std::int64_t> c(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) c[i] = to_i64(mod(coords[i], Integer(orders_[i])));
  return FqElement{std::move(c)};
}

FqElement FqModule::add(const FqElement& x, const FqElement& y) const {
  FqElement z = x;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    z.coords[i] += y.coords[i];
    if (z.coords[i] >= orders_[i]) z.coords[i] -= orders_[i];
  }
  return z;
}

FqElement FqModule::negate(const FqElement& x) const {
  FqElement z = x;
  for (std::size_t i = 0; i < orders_.size(); ++i) z.coords[i] = z.coords[i] == 0 ? 0 : orders_[i] - z.coords[i];
  return z;
}

FqElement FqModule::multiply(std::int64_t k, const FqElement& x) const {
  std::vector<std::int64_t> c(x.coords.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = static_cast<std::int64_t>((static_cast<__int128>(k) * x.coords[i]) % orders_[i]);
  }
  return reduce(std::move(c));
}

std::int64_t FqModule::element_order(const FqElement& x) const {
  std::int64_t ord = 1;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    const std::int64_t g = std::gcd(x.coords[i], orders_[i]);
    ord = std::lcm(ord, orders_[i] / g);
  }
  return ord;
}

Rational FqModule::q(const FqElement& x) const {
  Rational s = 0;
  const auto k = orders_.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (x.coords[i] == 0) continue;
    s += Rational(x.coords[i] * x.coords[i]) * q_gen_[i];
    for (std::size_t j = i + 1; j < k; ++j) {
      if (x.coords[j] == 0) continue;
      s += Rational(x.coords[i] * x.coords[j]) * gram_(i, j);
    }
  }
  return frac(s);
}

Rational FqModule::bilinear(const FqElement& x, const FqElement& y) const {
  Rational s = 0;
  const auto k = orders_.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (x.coords[i] == 0) continue;
    for (std::size_t j = 0; j < k; ++j) {
      if (y.coords[j] == 0) continue;
      s += Rational(x.coords[i] * y.coords[j]) * gram_(i, j);
    }
  }
  return frac(s);
}

FqModule FqModule::negated() const {
  RatMatrix g = gram_;
  std::vector<Rational> qg = q_gen_;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = frac(-g(i, j));
  for (auto& v : qg) v = frac(-v);
  std::optional<Signature> sig;
  if (source_signature_) sig = Signature{source_signature_->negative, source_signature_->positive};
  return FqModule(orders_, std::move(g), std::move(qg), sig);
}

bool FqModule::operator==(const FqModule& other) const {
  return orders_ == other.orders_ && gram_ == other.gram_ && q_gen_ == other.q_gen_;
}

bool FqModule::is_nondegenerate() const {
  std::vector<FqElement> gens;
  for (std::size_t i = 0; i < orders_.size(); ++i) gens.push_back(generator(i));
  const IntMatrix perp = perp_lattice(*this, gens);
  // perp contains diag(orders) Z^k; equality iff |det| matches.
  Integer expected = 1;
  for (auto d : orders_) expected *= d;
  return mp::abs(determinant<Integer>(perp)) == expected;
}

void FqModule::require_nondegenerate() const {
  if (!is_nondegenerate()) throw InputError("finite quadratic module is degenerate");
}

FqModule direct_sum(const FqModule& a, const FqModule& b) {
  const auto ka = static_cast<Eigen::Index>(a.num_generators());
  const auto kb = static_cast<Eigen::Index>(b.num_generators());
  std::vector<std::int64_t> orders = a.orders();
  orders.insert(orders.end(), b.orders().begin(), b.orders().end());
  RatMatrix g = RatMatrix::Zero(ka + kb, ka + kb);
  g.topLeftCorner(ka, ka) = a.gram_mod1();
  g.bottomRightCorner(kb, kb) = b.gram_mod1();
  std::vector<Rational> qg = a.q_gen();
  qg.insert(qg.end(), b.q_gen().begin(), b.q_gen().end());
  std::optional<Signature> sig;
  if (a.source_signature() && b.source_signature())
    sig = Signature{a.source_signature()->positive + b.source_signature()->positive,
                    a.source_signature()->negative + b.source_signature()->negative};
  return FqModule(std::move(orders), std::move(g), std::move(qg), sig);
}

Rational q_value(const FqModule& a, const FqElement& x) { return a.q(x); }
Rational bilinear(const FqModule& a, const FqElement& x, const FqElement& y) { return a.bilinear(x, y); }

std::complex<double> gauss_sum(const FqModule& a) {
  std::complex<double> s = 0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const double t = 2 * std::numbers::pi * to_double(a.q(a.element(i)));
    s += std::complex<double>(std::cos(t), std::sin(t));
  }
  return s;
}

int signature_mod8(const FqModule& a) {
  const std::complex<double> s = gauss_sum(a);
  const double expected = std::sqrt(static_cast<double>(a.size()));
  if (std::abs(std::abs(s) - expected) > 1e-8)
    throw ConsistencyError("Gauss sum magnitude " + std::to_string(std::abs(s)) + " differs from sqrt|A| = " +
                           std::to_string(expected) + " (degenerate quadratic form?)");
  const double eighths = std::arg(s) / (2 * std::numbers::pi) * 8;
  long r = std::lround(eighths) % 8;
  if (r < 0) r += 8;
  return static_cast<int>(r);
}

std::int64_t level(const FqModule& a) {
  Integer d = 1;
  const auto k = static_cast<Eigen::Index>(a.num_generators());
  for (Eigen::Index i = 0; i < k; ++i) {
    d = lcm(d, mp::denominator(a.q_gen()[i]));
    for (Eigen::Index j = i + 1; j < k; ++j) d = lcm(d, mp::denominator(a.gram_mod1()(i, j)));
  }
  return to_i64(d);
}

std::int64_t exponent(const FqModule& a) {
  std::int64_t e = 1;
  for (auto d : a.orders()) e = std::lcm(e, d);
  return e;
}

std::vector<FqElement> subgroup_elements(const FqModule& a, const std::vector<FqElement>& generators) {
  std::set<FqElement> seen{a.zero()};
  std::vector<FqElement> frontier{a.zero()};
  while (!frontier.empty()) {
    std::vector<FqElement> next;
    for (const auto& x : frontier) {
      for (const auto& g : generators) {
        FqElement y = a.add(x, a.reduce(g.coords));
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

IsotropicSubgroup IsotropicSubgroup::generate(const FqModule& parent, std::vector<FqElement> generators) {
  for (auto& g : generators) g = parent.reduce(g.coords);
  IsotropicSubgroup sub{generators, subgroup_elements(parent, generators)};
  for (const auto& x : sub.elements)
    if (parent.q(x) != 0) throw InputError("subgroup is not isotropic");
  return sub;
}

std::vector<std::int64_t> QuotientMap::fiber(std::int64_t quotient_index) const {
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(projection.size()); ++i)
    if (projection[i] == quotient_index) out.push_back(i);
  return out;
}

void QuotientMap::validate() const {
  if (static_cast<std::int64_t>(projection.size()) != cover.size())
    throw ConsistencyError("projection table has the wrong size");
  std::vector<std::int64_t> counts(quotient.size(), 0);
  std::vector<std::int64_t> perp;
  for (std::int64_t i = 0; i < cover.size(); ++i) {
    const FqElement x = cover.element(i);
    bool orthogonal = true;
    for (const auto& h : isotropic.elements)
      if (cover.bilinear(x, h) != 0) {
        orthogonal = false;
        break;
      }
    if (orthogonal != (projection[i] >= 0)) throw ConsistencyError("projection domain is not I^perp");
    if (!orthogonal) continue;
    perp.push_back(i);
    ++counts[projection[i]];
    if (quotient.q(quotient.element(projection[i])) != cover.q(x))
      throw ConsistencyError("projection does not preserve q");
  }
  for (auto c : counts)
    if (c != isotropic.size()) throw ConsistencyError("projection fibers are not I-cosets");
  for (const auto& h : isotropic.elements)
    if (projection[cover.index(h)] != 0) throw ConsistencyError("I is not in the kernel of the projection");
  // Homomorphism: check additivity against every generator of A' lying in I^perp and
  // against every element of I^perp when the group is small.
  std::vector<std::int64_t> probes;
  if (perp.size() <= 256) probes = perp;
  else probes.assign(perp.begin(), perp.begin() + 256);
  for (auto i : perp) {
    const FqElement x = cover.element(i);
    for (auto j : probes) {
      const FqElement y = cover.element(j);
      const auto s = projection[cover.index(cover.add(x, y))];
      const FqElement expected = quotient.add(quotient.element(projection[i]), quotient.element(projection[j]));
      if (s != quotient.index(expected)) throw ConsistencyError("projection is not a homomorphism");
    }
  }
}

QuotientMap perp_quotient(const FqModule& cover, const IsotropicSubgroup& isotropic) {
  for (const auto& x : isotropic.elements)
    if (cover.q(x) != 0) throw InputError("perp_quotient: subgroup is not isotropic");
  const auto k = static_cast<Eigen::Index>(cover.num_generators());

  QuotientMap qm;
  qm.cover = cover;
  qm.isotropic = isotropic;
  if (k == 0) {
    qm.quotient = cover;
    qm.projection = {0};
    return qm;
  }

  const IntMatrix perp = perp_lattice(cover, isotropic.generators);  // k x k
  const RatMatrix perp_inv = inverse(to_rational(perp));

  IntMatrix rel_gens(static_cast<Eigen::Index>(isotropic.generators.size()) + k, k);
  rel_gens.setZero();
  for (std::size_t l = 0; l < isotropic.generators.size(); ++l)
    for (Eigen::Index j = 0; j < k; ++j) rel_gens(static_cast<Eigen::Index>(l), j) = isotropic.generators[l].coords[j];
  for (Eigen::Index j = 0; j < k; ++j)
    rel_gens(static_cast<Eigen::Index>(isotropic.generators.size()) + j, j) = cover.orders()[j];
  const IntMatrix relations = row_basis(rel_gens);
  const RatMatrix rel_coords_q = to_rational(relations) * perp_inv;
  IntMatrix rel_coords(rel_coords_q.rows(), rel_coords_q.cols());
  for (Eigen::Index i = 0; i < rel_coords.rows(); ++i)
    for (Eigen::Index j = 0; j < rel_coords.cols(); ++j) {
      if (!is_integer(rel_coords_q(i, j))) throw ConsistencyError("perp_quotient: I is not contained in I^perp");
      rel_coords(i, j) = mp::numerator(rel_coords_q(i, j));
    }
  const auto snf = smith_normal_form<Integer>(rel_coords);
  const RatMatrix v_inv = inverse(to_rational(snf.v));

  std::vector<Eigen::Index> keep;
  std::vector<std::int64_t> orders;
  for (Eigen::Index i = 0; i < snf.d.rows() && i < snf.d.cols(); ++i) {
    if (snf.d(i, i) == 0) throw ConsistencyError("perp_quotient: quotient is infinite");
    if (snf.d(i, i) > 1) {
      keep.push_back(i);
      orders.push_back(to_i64(snf.d(i, i)));
    }
  }
  const auto kq = static_cast<Eigen::Index>(keep.size());
  std::vector<FqElement> lifts;
  for (auto i : keep) {
    const RatMatrix x = v_inv.row(i) * to_rational(perp);
    std::vector<Integer> c(k);
    for (Eigen::Index j = 0; j < k; ++j) c[j] = mp::numerator(x(0, j));
    lifts.push_back(cover.reduce(c));
  }
  RatMatrix gram(kq, kq);
  std::vector<Rational> qg(kq);
  for (Eigen::Index i = 0; i < kq; ++i) {
    qg[i] = cover.q(lifts[i]);
    for (Eigen::Index j = 0; j < kq; ++j) gram(i, j) = cover.bilinear(lifts[i], lifts[j]);
  }
  qm.quotient = FqModule(orders, gram, qg, cover.source_signature());

  qm.projection.assign(cover.size(), -1);
  const RatMatrix to_quotient = perp_inv * to_rational(snf.v);
  for (std::int64_t idx = 0; idx < cover.size(); ++idx) {
    const FqElement x = cover.element(idx);
    bool orthogonal = true;
    for (const auto& h : isotropic.generators)
      if (cover.bilinear(x, h) != 0) {
        orthogonal = false;
        break;
      }
    if (!orthogonal) continue;
    RatMatrix row(1, k);
    for (Eigen::Index j = 0; j < k; ++j) row(0, j) = x.coords[j];
    const RatMatrix c = row * to_quotient;
    std::vector<Integer> qc(kq);
    for (Eigen::Index i = 0; i < kq; ++i) qc[i] = mp::numerator(c(0, keep[i]));
    qm.projection[idx] = qm.quotient.index(qm.quotient.reduce(qc));
  }
  return qm;
}

GlueGraph extract_graph(const FqModule& a1, const FqModule& a2, const std::vector<FqElement>& isotropic) {
  const std::size_t k1 = a1.num_generators();
  GlueGraph g;
  std::set<std::int64_t> seen1, seen2;
  for (const auto& x : isotropic) {
    FqElement x1{{x.coords.begin(), x.coords.begin() + static_cast<std::ptrdiff_t>(k1)}};
    FqElement x2{{x.coords.begin() + static_cast<std::ptrdiff_t>(k1), x.coords.end()}};
    const auto i1 = a1.index(x1);
    const auto i2 = a2.index(x2);
    if (!seen1.insert(i1).second || !seen2.insert(i2).second)
      throw ConsistencyError("glue group is not the graph of an isomorphism (projection not injective)");
    g.g1.push_back(x1);
    g.g2.push_back(x2);
    g.iota.emplace_back(i1, i2);
  }
  std::sort(g.g1.begin(), g.g1.end());
  std::sort(g.g2.begin(), g.g2.end());
  std::sort(g.iota.begin(), g.iota.end());
  return g;
}

nlohmann::json to_json(const FqModule& a) {
  nlohmann::json j;
  j["orders"] = a.orders();
  nlohmann::json gram = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.gram_mod1().rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < a.gram_mod1().cols(); ++c) row.push_back(to_string(a.gram_mod1()(i, c)));
    gram.push_back(row);
  }
  j["gram_mod1"] = gram;
  nlohmann::json qg = nlohmann::json::array();
  for (const auto& v : a.q_gen()) qg.push_back(to_string(v));
  j["q_gen"] = qg;
  if (a.source_signature())
    j["signature"] = {a.source_signature()->positive, a.source_signature()->negative};
  return j;
}

namespace {
Rational rational_from_json(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  throw InputError("expected a rational given as \"num/den\" or an integer");
}
}  // namespace

FqModule fqm_from_json(const nlohmann::json& j) {
  try {
    auto orders = j.at("orders").get<std::vector<std::int64_t>>();
    const auto k = static_cast<Eigen::Index>(orders.size());
    RatMatrix gram(k, k);
    const auto& gj = j.at("gram_mod1");
    if (static_cast<Eigen::Index>(gj.size()) != k) throw InputError("gram_mod1 has the wrong size");
    for (Eigen::Index r = 0; r < k; ++r) {
      if (static_cast<Eigen::Index>(gj[r].size()) != k) throw InputError("gram_mod1 has the wrong size");
      for (Eigen::Index c = 0; c < k; ++c) gram(r, c) = rational_from_json(gj[r][c]);
    }
    std::vector<Rational> qg;
    for (const auto& v : j.at("q_gen")) qg.push_back(rational_from_json(v));
    std::optional<Signature> sig;
    if (j.contains("signature")) sig = Signature{j["signature"][0].get<int>(), j["signature"][1].get<int>()};
    return FqModule(std::move(orders), std::move(gram), std::move(qg), sig);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed finite quadratic module: ") + e.what());
  }
}

}  // namespace qpb
