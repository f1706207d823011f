#include "qpb/lattice.hpp"

#include <cctype>

#include "qpb/integer_matrix.hpp"

namespace qpb {

EvenLattice::EvenLattice(IntMatrix gram, std::string name) : gram_(std::move(gram)), name_(std::move(name)) {
  if (gram_.rows() != gram_.cols()) throw InputError("Gram matrix is not square");
  for (Eigen::Index i = 0; i < gram_.rows(); ++i) {
    if (gram_(i, i) % 2 != 0) throw InputError("Gram matrix has an odd diagonal entry (lattice not even)");
    for (Eigen::Index j = 0; j < i; ++j)
      if (gram_(i, j) != gram_(j, i)) throw InputError("Gram matrix is not symmetric");
  }
  gram_q_ = to_rational(gram_);
  det_ = qpb::determinant<Integer>(gram_);
  if (det_ == 0) throw InputError("Gram matrix is degenerate");
  const Inertia in = inertia(gram_q_);
  signature_ = Signature{in.positive, in.negative};
}

Rational EvenLattice::pairing(const RatVector& x, const RatVector& y) const {
  return x.dot(gram_q_ * y);
}

EvenLattice EvenLattice::scaled(const Integer& s) const {
  IntMatrix g = gram_ * s;
  return EvenLattice(std::move(g), name_.empty() ? name_ : name_ + "(" + s.str() + ")");
}

EvenLattice orthogonal_sum(const std::vector<EvenLattice>& parts, std::string name) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.rank();
  IntMatrix g = IntMatrix::Zero(n, n);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    g.block(at, at, p.rank(), p.rank()) = p.gram();
    at += p.rank();
  }
  return EvenLattice(std::move(g), std::move(name));
}

Sublattice::Sublattice(EvenLattice amb, IntMatrix b) : ambient(std::move(amb)), basis(std::move(b)) {
  if (basis.cols() != ambient.rank()) throw InputError("sublattice basis has the wrong number of columns");
  if (basis.rows() > 0) {
    const auto snf = smith_normal_form<Integer>(basis);
    if (snf.rank() != basis.rows()) throw InputError("sublattice basis rows are linearly dependent");
  }
}

bool Sublattice::is_primitive() const { return qpb::is_primitive(basis); }

DiscriminantForm::DiscriminantForm(const EvenLattice& lattice) : lattice_(lattice) {
  const Eigen::Index n = lattice.rank();
  const auto snf = smith_normal_form<Integer>(lattice.gram());
  to_snf_ = snf.u * lattice.gram();
  std::vector<std::int64_t> orders;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (snf.d(i, i) > 1) {
      kept_.push_back(i);
      orders.push_back(snf.d(i, i).convert_to<std::int64_t>());
    }
  }
  const auto k = static_cast<Eigen::Index>(kept_.size());
  lifts_ = RatMatrix(n, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < n; ++r) lifts_(r, c) = Rational(snf.v(r, kept_[c]), snf.d(kept_[c], kept_[c]));
  RatMatrix gram(k, k);
  std::vector<Rational> qg(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    qg[a] = frac(lattice.q(lifts_.col(a)));
    for (Eigen::Index b = 0; b < k; ++b) gram(a, b) = frac(lattice.pairing(RatVector(lifts_.col(a)), RatVector(lifts_.col(b))));
  }
  module_ = FqModule(std::move(orders), std::move(gram), std::move(qg), lattice.signature());
}

bool DiscriminantForm::in_dual(const RatVector& x) const {
  if (x.size() != lattice_.rank()) return false;
  const RatVector y = lattice_.rational_gram() * x;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!is_integer(y(i))) return false;
  return true;
}

FqElement DiscriminantForm::project(const RatVector& x) const {
  if (!in_dual(x)) throw InputError("vector is not in the dual lattice");
  const RatVector z = to_rational(to_snf_) * x;
  std::vector<Integer> c(kept_.size());
  for (std::size_t i = 0; i < kept_.size(); ++i) c[i] = mp::numerator(z(kept_[i]));
  return module_.reduce(c);
}

RatVector DiscriminantForm::lift(const FqElement& a) const {
  RatVector x = RatVector::Zero(lattice_.rank());
  for (std::size_t i = 0; i < a.coords.size(); ++i)
    if (a.coords[i] != 0) x += Rational(a.coords[i]) * lifts_.col(static_cast<Eigen::Index>(i));
  return x;
}

DiscriminantForm DiscriminantForm::negated() const {
  DiscriminantForm out = *this;
  out.lattice_ = lattice_.scaled(-1);
  out.module_ = module_.negated();
  return out;
}

DiscriminantForm discriminant_form(const EvenLattice& lattice) { return DiscriminantForm(lattice); }

Sublattice orthogonal_complement(const EvenLattice& lattice, const Sublattice& s) {
  if (s.rank() > 0 && qpb::determinant<Integer>(s.induced_gram()) == 0)
    throw InputError("orthogonal complement of a degenerate sublattice");
  if (s.rank() == 0) return Sublattice(lattice, IntMatrix::Identity(lattice.rank(), lattice.rank()));
  const IntMatrix sg = s.basis * lattice.gram();
  return Sublattice(lattice, integer_kernel(sg));
}

RatVector EmbeddingData::to_L_coords(const RatVector& lprime_coords) const {
  return to_rational(change_of_basis).transpose() * lprime_coords;
}

EmbeddingData build_embedding(const EvenLattice& lattice, const IntMatrix& k_basis, bool assert_witt) {
  EmbeddingData e;
  e.L = lattice;
  e.K_neg = Sublattice(lattice, k_basis);
  const Eigen::Index r = e.K_neg.rank();
  if (r > 0) {
    const Inertia in = inertia(to_rational(e.K_neg.induced_gram()));
    if (in.negative != r) throw InputError("K(-1) is not negative definite");
  }
  if (!e.K_neg.is_primitive()) throw InputError("K(-1) is not primitive in L (its saturation is larger)");
  e.M = orthogonal_complement(lattice, e.K_neg);
  e.M_lattice = e.M.induced("M");
  e.K_neg_lattice = e.K_neg.induced("K(-1)");
  e.K_lattice = e.K_neg_lattice.scaled(-1);
  e.L_prime = orthogonal_sum({e.M_lattice, e.K_neg_lattice}, "L'");

  const Eigen::Index n = lattice.rank();
  const Eigen::Index m = e.M.rank();
  e.change_of_basis = IntMatrix(n, n);
  e.change_of_basis.topRows(m) = e.M.basis;
  e.change_of_basis.bottomRows(r) = k_basis;
  e.index = mp::abs(qpb::determinant<Integer>(e.change_of_basis));

  e.disc_L = DiscriminantForm(lattice);
  e.disc_M = DiscriminantForm(e.M_lattice);
  e.disc_K = DiscriminantForm(e.K_lattice);
  e.disc_K_neg = e.disc_K.negated();
  const FqModule& am = e.disc_M.module();
  const FqModule& ak = e.disc_K_neg.module();
  e.A_L_prime = direct_sum(am, ak);

  // Basis vectors of L in the basis of L' are the rows of P^{-1}.
  const RatMatrix p_inv = inverse(to_rational(e.change_of_basis));
  auto split_class = [&](const RatVector& c) {
    const FqElement a = e.disc_M.project(c.head(m));
    const FqElement b = e.disc_K_neg.project(c.tail(r));
    FqElement x = a;
    x.coords.insert(x.coords.end(), b.coords.begin(), b.coords.end());
    return x;
  };
  std::vector<FqElement> gens;
  for (Eigen::Index j = 0; j < n; ++j) {
    FqElement g = split_class(p_inv.row(j).transpose());
    if (g != e.A_L_prime.zero()) gens.push_back(std::move(g));
  }
  try {
    e.glue = IsotropicSubgroup::generate(e.A_L_prime, gens);
  } catch (const InputError& err) {
    throw ConsistencyError(std::string("glue group: ") + err.what());
  }
  if (Integer(e.glue.size()) != e.index) throw ConsistencyError("glue group order differs from [L : L']");

  e.to_L.cover = e.A_L_prime;
  e.to_L.quotient = e.disc_L.module();
  e.to_L.isotropic = e.glue;
  e.to_L.projection.assign(e.A_L_prime.size(), -1);
  for (std::int64_t idx = 0; idx < e.A_L_prime.size(); ++idx) {
    const FqElement x = e.A_L_prime.element(idx);
    bool orthogonal = true;
    for (const auto& h : e.glue.generators)
      if (e.A_L_prime.bilinear(x, h) != 0) {
        orthogonal = false;
        break;
      }
    if (!orthogonal) continue;
    const std::int64_t im = idx / ak.size();
    const std::int64_t ik = idx % ak.size();
    RatVector c(n);
    c.head(m) = e.disc_M.lift(am.element(im));
    c.tail(r) = e.disc_K_neg.lift(ak.element(ik));
    e.to_L.projection[idx] = e.disc_L.module().index(e.disc_L.project(e.to_L_coords(c)));
  }
  e.graph = extract_graph(am, ak, e.glue.elements);

  if (m < 5) {
    e.warnings.push_back("rank(M) = " + std::to_string(m) +
                         " < 5: the Witt index condition cannot be checked automatically and must be asserted");
    e.witt_unverified = !assert_witt;
  }
  return e;
}

void validate_embedding(const EmbeddingData& e) {
  if (!e.K_neg.is_primitive()) throw ConsistencyError("K(-1) is not primitive");
  if (!(e.M.basis * e.L.gram() * e.K_neg.basis.transpose()).isZero())
    throw ConsistencyError("M is not orthogonal to K(-1)");
  if (e.M.rank() + e.K_neg.rank() != e.L.rank()) throw ConsistencyError("rank(M) + rank(K) != rank(L)");
  if (!e.M.is_primitive()) throw ConsistencyError("M is not primitive");
  if (Integer(e.A_L_prime.size()) != Integer(e.disc_L.module().size()) * e.index * e.index)
    throw ConsistencyError("|A_L'| != |A_L| [L:L']^2");
  for (const auto& x : e.glue.elements)
    if (e.A_L_prime.q(x) != 0) throw ConsistencyError("glue group is not isotropic");
  const FqModule& am = e.disc_M.module();
  const FqModule& ak = e.disc_K_neg.module();
  for (const auto& [im, ik] : e.graph.iota) {
    const FqElement a = am.element(im), b = ak.element(ik);
    if (frac(am.q(a) + ak.q(b)) != 0) throw ConsistencyError("iota is not an anti-isometry");
    if (am.element_order(a) != ak.element_order(b)) throw ConsistencyError("iota does not preserve orders");
  }
  e.to_L.validate();
}

namespace lattices {

EvenLattice U() { return EvenLattice((IntMatrix(2, 2) << 0, 1, 1, 0).finished(), "U"); }

namespace {
IntMatrix cartan_e(int n) {
  // Nodes 1..n; chain 1-3-4-5-...-n and 2-4.
  IntMatrix g = IntMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) g(i, i) = 2;
  auto edge = [&](int a, int b) { g(a - 1, b - 1) = g(b - 1, a - 1) = -1; };
  edge(1, 3);
  edge(2, 4);
  for (int i = 3; i < n; ++i) edge(i, i + 1);
  return g;
}
}  // namespace

EvenLattice E8() { return EvenLattice(cartan_e(8), "E8"); }
EvenLattice E7() { return EvenLattice(cartan_e(7), "E7"); }
EvenLattice A1() { return EvenLattice((IntMatrix(1, 1) << 2).finished(), "A1"); }

EvenLattice II_2_26() {
  const EvenLattice e8n = E8().scaled(-1);
  return orthogonal_sum({U(), U(), e8n, e8n, e8n}, "II_2_26");
}

}  // namespace lattices

namespace {

class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& text) : s_(text) {}

  EvenLattice parse() {
    EvenLattice l = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return l;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("lattice expression '" + s_ + "': " + why + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return s_.substr(start, pos_ - start);
  }
  Integer integer() {
    skip();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string t = s_.substr(start, pos_ - start);
    if (t.empty() || t == "-" || t == "+") fail("expected an integer");
    return Integer(t[0] == '+' ? t.substr(1) : t);
  }
  EvenLattice expr() {
    if (eat('<')) {
      const Integer n = integer();
      expect('>');
      return EvenLattice((IntMatrix(1, 1) << n).finished(), "<" + n.str() + ">");
    }
    const std::string id = ident();
    if (id == "scale") {
      expect('(');
      EvenLattice inner = expr();
      expect(',');
      const Integer s = integer();
      expect(')');
      return EvenLattice(inner.scaled(s).gram(), "scale(" + inner.name() + ", " + s.str() + ")");
    }
    if (id == "sum") {
      expect('(');
      std::vector<EvenLattice> parts{expr()};
      while (eat(',')) parts.push_back(expr());
      expect(')');
      std::string name = "sum(";
      for (std::size_t i = 0; i < parts.size(); ++i) name += (i ? ", " : "") + parts[i].name();
      return orthogonal_sum(parts, name + ")");
    }
    if (id == "U") return lattices::U();
    if (id == "E8") return lattices::E8();
    if (id == "E7") return lattices::E7();
    if (id == "A1") return lattices::A1();
    if (id == "II_2_26") return lattices::II_2_26();
    fail("unknown lattice '" + id + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

EvenLattice parse_lattice_expression(const std::string& text) { return ExpressionParser(text).parse(); }

IntMatrix int_matrix_from_json(const nlohmann::json& j, Eigen::Index cols) {
  try {
    if (j.is_object() && j.contains("unit_rows")) {
      if (cols < 0) throw InputError("unit_rows needs a known ambient rank");
      const auto rows = j.at("unit_rows").get<std::vector<Eigen::Index>>();
      IntMatrix m = IntMatrix::Zero(static_cast<Eigen::Index>(rows.size()), cols);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= cols) throw InputError("unit_rows index out of range");
        m(static_cast<Eigen::Index>(i), rows[i]) = 1;
      }
      return m;
    }
    if (!j.is_array()) throw InputError("expected an integer matrix");
    const auto r = static_cast<Eigen::Index>(j.size());
    const Eigen::Index c = r == 0 ? std::max<Eigen::Index>(cols, 0) : static_cast<Eigen::Index>(j[0].size());
    if (cols >= 0 && c != cols) throw InputError("matrix has " + std::to_string(c) + " columns, expected " + std::to_string(cols));
    IntMatrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      if (static_cast<Eigen::Index>(j[i].size()) != c) throw InputError("ragged integer matrix");
      for (Eigen::Index k = 0; k < c; ++k) {
        const auto& v = j[i][k];
        if (v.is_number_integer()) m(i, k) = v.get<std::int64_t>();
        else if (v.is_string()) m(i, k) = Integer(v.get<std::string>());
        else throw InputError("matrix entry is not an integer");
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed integer matrix: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(std::string("malformed integer matrix: ") + e.what());
  }
}

nlohmann::json to_json(const IntMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (mp::abs(m(i, k)) < Integer("9007199254740992")) row.push_back(m(i, k).convert_to<std::int64_t>());
      else row.push_back(m(i, k).str());
    }
    out.push_back(row);
  }
  return out;
}

nlohmann::json to_json(const EvenLattice& lattice) {
  return {{"name", lattice.name()}, {"gram", to_json(lattice.gram())}};
}

LatticeDefinition lattice_from_json(const nlohmann::json& j) {
  LatticeDefinition def;
  if (j.is_string()) {
    def.lattice = parse_lattice_expression(j.get<std::string>());
    return def;
  }
  if (!j.is_object()) throw InputError("lattice must be an expression string or an object");
  const std::string name = j.value("name", std::string{});
  if (j.contains("gram")) def.lattice = EvenLattice(int_matrix_from_json(j.at("gram")), name);
  else if (j.contains("expr")) def.lattice = parse_lattice_expression(j.at("expr").get<std::string>());
  else throw InputError("lattice object needs 'gram' or 'expr'");
  if (j.contains("sublattices")) {
    for (const auto& [key, value] : j.at("sublattices").items())
      def.sublattices[key] = int_matrix_from_json(value, def.lattice.rank());
  }
  return def;
}

}  // namespace qpb
