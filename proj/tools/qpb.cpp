#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpb/borcherds.hpp"
#include "qpb/fqm.hpp"
#include "qpb/induction.hpp"
#include "qpb/lattice.hpp"
#include "qpb/qexp.hpp"
#include "qpb/theta.hpp"
#include "qpb/transfer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qpb;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

struct Flags {
  std::string config;
  std::string nmax;
  std::string out;
  bool assert_witt = false;
  std::optional<std::uint64_t> seed;
};

struct Scenario {
  json cfg;
  fs::path dir;  // relative paths in the config resolve here

  const json& at(const std::string& key) const {
    if (!cfg.contains(key)) throw InputError("config has no \"" + key + "\"");
    return cfg.at(key);
  }
};

Scenario load(const Flags& flags) {
  std::ifstream in(flags.config);
  if (!in) throw InputError("cannot read config " + flags.config);
  Scenario s;
  s.cfg = json::parse(in);
  if (!s.cfg.is_object()) throw InputError("config must be a JSON object");
  s.dir = fs::path(flags.config).parent_path();
  return s;
}

Rational parse_rational(const json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (!v.is_string()) throw InputError("expected an integer or a rational string, got " + v.dump());
  try {
    return Rational(v.get<std::string>());
  } catch (const std::exception&) {
    throw InputError("not a rational: " + v.dump());
  }
}

Rational n_max_of(const Scenario& s, const Flags& flags) {
  const Rational n = flags.nmax.empty() ? parse_rational(s.at("n_max")) : parse_rational(json(flags.nmax));
  if (n < 0) throw InputError("n_max must be >= 0");
  return n;
}

std::uint64_t seed_of(const Scenario& s, const Flags& flags) {
  if (flags.seed) return *flags.seed;
  return s.cfg.value("seed", std::uint64_t{1});
}

void write_file(const Flags& flags, const std::string& name, const std::string& text) {
  if (flags.out.empty()) return;
  fs::create_directories(flags.out);
  std::ofstream os(fs::path(flags.out) / name, std::ios::binary);
  if (!os) throw InputError("cannot write " + (fs::path(flags.out) / name).string());
  os << text;
}

// "sublattice name" from the lattice definition, or a matrix / {"unit_rows"} in L coordinates.
IntMatrix k_basis_of(const Scenario& s, const LatticeDefinition& def) {
  const json& emb = s.at("embedding");
  const json& k = emb.is_object() && emb.contains("k_basis") ? emb.at("k_basis") : emb;
  if (k.is_string()) {
    const auto it = def.sublattices.find(k.get<std::string>());
    if (it == def.sublattices.end()) throw InputError("unknown sublattice \"" + k.get<std::string>() + "\"");
    return it->second;
  }
  return int_matrix_from_json(k, def.lattice.rank());
}

FqModule module_of(const Scenario& s, const std::string& key) {
  const json& m = s.at(key);
  if (m.is_object() && m.contains("orders")) return fqm_from_json(m);
  return discriminant_module(lattice_from_json(m).lattice);
}

std::vector<FqElement> isotropic_generators(const Scenario& s, const FqModule& a) {
  std::vector<FqElement> gens;
  if (!s.cfg.contains("isotropic")) return gens;
  for (const auto& g : s.cfg.at("isotropic")) {
    const auto coords = g.get<std::vector<std::int64_t>>();
    if (coords.size() != a.num_generators()) throw InputError("isotropic generator has the wrong number of coordinates");
    gens.push_back(a.reduce(coords));
  }
  return gens;
}

InduceOptions induce_options(const json& spec, const Scenario& s, const Flags& flags) {
  InduceOptions o;
  o.d = spec.value("d", std::int64_t{0});
  o.seed = seed_of(s, flags);
  o.tolerance = spec.value("tolerance", 1e-7);
  return o;
}

// The input form f over A_L.
VVForm form_of(const Scenario& s, const Flags& flags, const FqModule& a_l, const Rational& n_max) {
  const json& spec = s.at("form");
  const Rational trunc = spec.is_object() && spec.contains("trunc") ? parse_rational(spec.at("trunc")) : n_max;
  if (spec.is_string() || (spec.is_object() && spec.contains("scalar"))) {
    const ScalarInput phi = scalar_input_from_json(spec.is_string() ? spec : spec.at("scalar"));
    if (!a_l.is_trivial()) throw InputError("a scalar form needs a unimodular lattice; use \"ind\" or \"file\"");
    return scalar_form(phi.expand(trunc), phi.weight());
  }
  if (!spec.is_object()) throw InputError("\"form\" must be a string or an object");
  if (spec.contains("file")) {
    std::ifstream in(s.dir / spec.at("file").get<std::string>());
    if (!in) throw InputError("cannot read series file " + spec.at("file").get<std::string>());
    return read_series(in);
  }
  if (spec.contains("series")) return series_from_json(spec.at("series"));
  if (spec.contains("ind")) {
    const json& ind = spec.at("ind");
    return induce(a_l, scalar_input_from_json(ind.at("phi")), trunc, induce_options(ind, s, flags)).form;
  }
  throw InputError("\"form\" needs one of scalar, file, series, ind");
}

json signature_json(const Signature& sig) { return json::array({sig.positive, sig.negative}); }

int cmd_lattice_info(const Flags& flags) {
  const Scenario s = load(flags);
  const LatticeDefinition def = lattice_from_json(s.at("lattice"));
  const EvenLattice& l = def.lattice;
  const DiscriminantForm disc(l);
  const FqModule& a = disc.module();
  json j;
  j["lattice"] = to_json(l);
  j["rank"] = l.rank();
  j["signature"] = signature_json(l.signature());
  j["determinant"] = l.determinant().str();
  j["discriminant_group"] = to_json(a);
  j["order"] = a.size();
  j["sigma_mod8"] = signature_mod8(a);
  j["level"] = level(a);
  j["exponent"] = exponent(a);
  const int expected = ((l.signature().positive - l.signature().negative) % 8 + 8) % 8;
  if (j["sigma_mod8"] != expected)
    throw ConsistencyError("Gauss sum gives sigma = " + std::to_string(signature_mod8(a)) + ", lattice gives " +
                           std::to_string(expected));
  if (s.cfg.contains("embedding")) {
    const EmbeddingData emb = build_embedding(l, k_basis_of(s, def), flags.assert_witt || s.cfg.value("assert_witt", false));
    validate_embedding(emb);
    j["embedding"] = {{"index", emb.index.str()},
                      {"rank_M", emb.M.rank()},
                      {"rank_K", emb.K_neg.rank()},
                      {"signature_M", signature_json(emb.M_lattice.signature())},
                      {"A_M", to_json(emb.disc_M.module())},
                      {"A_K", to_json(emb.disc_K.module())},
                      {"glue_order", emb.glue.size()},
                      {"witt_unverified", emb.witt_unverified},
                      {"warnings", emb.warnings}};
  }
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  write_file(flags, "lattice_info.json", text);
  return kPass;
}

int cmd_theta(const Flags& flags) {
  const Scenario s = load(flags);
  const EvenLattice l = lattice_from_json(s.at("lattice")).lattice;
  if (!l.is_positive_definite()) throw InputError("theta series need a positive definite lattice");
  const std::string text = series_to_string(theta_vv(l, n_max_of(s, flags)));
  std::cout << text;
  write_file(flags, "theta.json", text);
  return kPass;
}

int cmd_qp_verify(const Flags& flags) {
  const Scenario s = load(flags);
  const LatticeDefinition def = lattice_from_json(s.at("lattice"));
  const Rational n_max = n_max_of(s, flags);
  const EmbeddingData emb =
      build_embedding(def.lattice, k_basis_of(s, def), flags.assert_witt || s.cfg.value("assert_witt", false));
  validate_embedding(emb);
  VVForm f = form_of(s, flags, emb.disc_L.module(), n_max);

  VerifyOptions options;
  options.check_modularity = s.cfg.value("check_modularity", true);
  if (s.cfg.contains("fault")) {
    const json& fault = s.cfg.at("fault");
    const auto read = [](const json& x) {
      return VerifyOptions::Fault{x.at("index").get<std::int64_t>(), parse_rational(x.at("n")),
                                  parse_rational(x.at("delta"))};
    };
    if (fault.contains("principal")) {
      const auto flt = read(fault.at("principal"));
      f.add_to(flt.index, flt.n, flt.delta);
    }
    if (fault.contains("lift")) options.lift_fault = read(fault.at("lift"));
  }

  const QPReport report = verify_main_theorem(f, emb, n_max, options);
  std::cout << report.table();
  write_file(flags, "report.json", report.to_json().dump(2) + "\n");
  write_file(flags, "g.json", series_to_string(report.g));
  return report.pass ? kPass : kFail;
}

int cmd_induce(const Flags& flags) {
  const Scenario s = load(flags);
  const FqModule a = module_of(s, "module");
  const Rational n_max = n_max_of(s, flags);
  const ScalarInput phi = scalar_input_from_json(s.at("phi"));
  const InduceOptions options = induce_options(s.cfg, s, flags);
  const IsotropicSubgroup iso = IsotropicSubgroup::generate(a, isotropic_generators(s, a));

  const InduceResult r = induce(a, iso, phi, n_max, options);
  json summary = {{"phi", to_string(phi)},
                  {"weight", phi.weight().str()},
                  {"d", r.d},
                  {"cosets", r.cosets},
                  {"isotropic_order", iso.size()},
                  {"residual", r.residual},
                  {"dependence", r.dependence}};
  bool pass = true;

  // ind_{A'}^I against the quotient A = I^perp / I: push(ind_A') = ind_A and pull(ind_A) = ind_A'^I.
  if (s.cfg.value("check_transfer", false)) {
    if (iso.size() == 1) throw InputError("check_transfer needs a nontrivial isotropic subgroup");
    const QuotientMap qm = perp_quotient(a, iso);
    InduceOptions o = options;
    o.d = r.d;
    const InduceResult full = induce(a, phi, n_max, o);
    const InduceResult small = induce(qm.quotient, phi, n_max, o);
    const bool push_ok = push_down(full.form, qm) == small.form;
    const bool pull_ok = pull_up(small.form, qm) == r.form;
    summary["transfer"] = {{"quotient", to_json(qm.quotient)}, {"push_down", push_ok}, {"pull_up", pull_ok}};
    pass = push_ok && pull_ok;
  }
  summary["verdict"] = pass ? "pass" : "fail";

  const std::string text = series_to_string(r.form);
  std::cout << text;
  std::cerr << summary.dump() << "\n";
  write_file(flags, "induced.json", text);
  write_file(flags, "induce_summary.json", summary.dump(2) + "\n");
  return pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-pullbacks of Borcherds products: lattices, theta series, induction and the verifier"};
  app.require_subcommand(1);
  Flags flags;
  const auto add_flags = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--nmax", flags.nmax, "truncation, overrides n_max in the config");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_flag("--assert-witt", flags.assert_witt, "take the Witt-index hypothesis as given");
    sub->add_option("--seed", flags.seed, "seed of the random transversal");
  };
  std::function<int(const Flags&)> run;
  const auto add = [&](const char* name, const char* help, int (*fn)(const Flags&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_flags(sub);
    sub->callback([&run, fn] { run = fn; });
  };
  add("lattice-info", "discriminant form, signature and level", cmd_lattice_info);
  add("theta", "vector-valued theta series of a positive definite lattice", cmd_theta);
  add("qp-verify", "check the quasi-pullback identity for an embedding", cmd_qp_verify);
  add("induce", "induce a scalar form to a finite quadratic module", cmd_induce);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kInputError;
  }

  try {
    return run(flags);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConsistencyError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
