#include "pavelka/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>

#include <CLI11.hpp>

#include "pavelka/connectives.hpp"
#include "pavelka/error.hpp"
#include "pavelka/evaluator.hpp"
#include "pavelka/io.hpp"
#include "pavelka/structure.hpp"
#include "pavelka/transforms.hpp"
#include "pavelka/types.hpp"

namespace pavelka::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

// Thrown by handlers for usage problems that CLI11 cannot see.
struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string structure, signature, formula, theory, family, gamma, sigma, type, tuple, subset, formulas, grid;
  std::string target = "halfx", spec, term, h, lipschitz, pred, relation, at, lt, delta, phi, metric;
  std::string space, types, p, q, corpus, m0, m1, keep, map, out;
  std::vector<std::string> assign;
  int n = 8, arity = 1, corpus_grid = 4, workers = 1;
  std::int64_t scale_p = 1;
  int scale_k = 1;
  int bound = -1;
};

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

// A formula argument is read from the named file when one exists.
std::string formula_text(const std::string& arg) {
  std::error_code ec;
  if (!arg.empty() && fs::is_regular_file(arg, ec)) return trim(io::read_file(arg));
  return arg;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

std::vector<Rational> rational_list(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& item : split_list(s)) out.push_back(Rational::parse(item));
  return out;
}

Tuple element_list(const Structure& m, const std::string& s) {
  Tuple t;
  for (const auto& name : split_list(s)) t.push_back(m.element(name));
  return t;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Usage(std::string("missing required option ") + flag);
}

class Runner {
public:
  Runner(Options& o, std::ostream& out) : o_(o), out_(out) {}

  void emit(const Json& j) { emit_text(j.dump(2) + "\n"); }

  void emit_text(const std::string& text) {
    if (o_.out.empty()) {
      out_ << text;
    } else {
      io::write_file(o_.out, text);
    }
  }

  Vocabulary vocabulary_option() {
    if (!o_.signature.empty()) return io::load_signature(o_.signature).vocabulary;
    if (!o_.structure.empty()) return io::load_structure(o_.structure).vocabulary();
    return {};
  }

  int validate() {
    require(o_.structure, "--struct");
    Structure m = io::load_structure(o_.structure);
    Signature s;
    if (o_.signature.empty()) {
      s.vocabulary = m.vocabulary();
    } else {
      s = io::load_signature(o_.signature);
    }
    ValidationReport r = validate_structure(m, s);
    emit(io::to_json(r));
    return r.pass() ? 0 : 1;
  }

  int eval_cmd() {
    require(o_.structure, "--struct");
    require(o_.formula, "--formula");
    Structure m = io::load_structure(o_.structure);
    Formula f = parse_formula(formula_text(o_.formula), m.vocabulary());
    Assignment a;
    for (const auto& item : o_.assign) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw Usage("--assign expects var=element, got '" + item + "'");
      a[trim(item.substr(0, eq))] = m.element(trim(item.substr(eq + 1)));
    }
    emit_text(eval(m, f, a).str() + "\n");
    return 0;
  }

  int check() {
    require(o_.structure, "--struct");
    require(o_.theory, "--theory");
    Structure m = io::load_structure(o_.structure);
    Theory t = io::theory_from_json(io::read_json(o_.theory), m.vocabulary());
    TheoryReport r = check_theory(m, t);
    emit(io::to_json(r));
    return r.satisfied ? 0 : 1;
  }

  io::Family family() {
    require(o_.family, "--family");
    return io::load_family(o_.family);
  }

  Vocabulary family_vocabulary(const io::Family& f) {
    if (!o_.signature.empty()) return io::load_signature(o_.signature).vocabulary;
    return f.vocabulary();
  }

  Theory theory_option(const Vocabulary& v) {
    if (o_.theory.empty()) return {};
    return io::theory_from_json(io::read_json(o_.theory), v);
  }

  int entails_cmd() {
    io::Family f = family();
    Vocabulary v = family_vocabulary(f);
    require(o_.gamma, "--gamma");
    require(o_.sigma, "--sigma");
    Theory t = theory_option(v);
    TypeSet g = io::typeset_from_json(io::read_json(o_.gamma), v);
    TypeSet s = io::typeset_from_json(io::read_json(o_.sigma), v);
    EntailmentResult r = entails(f.structures, t, g, s);
    emit(io::to_json(r, f));
    return r.holds ? 0 : 1;
  }

  int tv_test() {
    require(o_.structure, "--struct");
    require(o_.formulas, "--formulas");
    require(o_.grid, "--grid");
    Structure m = io::load_structure(o_.structure);
    Tuple subset;
    if (o_.subset.empty()) {
      for (Element e = 0; e < m.size(); ++e) subset.push_back(e);
    } else {
      subset = element_list(m, o_.subset);
    }
    Vocabulary v = named_vocabulary(m, subset);
    std::vector<Formula> formulas;
    std::string text = io::read_file(o_.formulas);
    if (fs::path(o_.formulas).extension() == ".json") {
      for (const auto& s : Json::parse(text)) formulas.push_back(parse_formula(s.get<std::string>(), v));
    } else {
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        line = trim(line);
        if (!line.empty() && line[0] != '#') formulas.push_back(parse_formula(line, v));
      }
    }
    auto grid = rational_list(o_.grid);
    TarskiVaughtReport r = tarski_vaught_check(m, subset, formulas, grid);
    Json j;
    j["pass"] = r.pass();
    Json list = Json::array();
    for (const auto& fail : r.failures) {
      list.push_back({{"formula", render(formulas[fail.formula_index])}, {"r", fail.r.str()}, {"best", fail.best.str()}});
    }
    j["failures"] = list;
    emit(j);
    return r.pass() ? 0 : 1;
  }

  Rational spacing() {
    if (!o_.h.empty()) return Rational::parse(o_.h);
    return Rational(1, 8 * static_cast<std::int64_t>(o_.n));
  }

  int approx() {
    if (o_.n < 1) throw Usage("--n must be positive");
    Json j;
    Approximation a{ConnectiveTerm::constant(Rational(0), 1), Rational(0), false};
    if (!o_.spec.empty()) {
      PLSpec s = io::plspec_from_json(io::read_json(o_.spec));
      a = approx_lattice(s, o_.n);
      j["target"] = "lattice";
    } else if (o_.target == "halfx") {
      ConnectiveTerm t = half_approx(o_.n);
      Oracle half{1, [](std::span<const Rational> x) { return x[0] / Rational(2); }};
      a = {t, certify(t, half, spacing(), Rational(1, 2)), false};
      j["target"] = "halfx";
    } else if (o_.target == "scale") {
      a = scale_dyadic(o_.scale_p, o_.scale_k, o_.n);
      j["target"] = "scale";
      j["p"] = o_.scale_p;
      j["k"] = o_.scale_k;
    } else {
      throw Usage("unknown --target '" + o_.target + "' (halfx, scale, or use --spec)");
    }
    j["n"] = o_.n;
    j["arity"] = a.term.arity();
    j["term"] = render(a.term);
    j["error_bound"] = a.error_bound.str();
    j["exact"] = a.exact;
    j["term_lipschitz"] = lipschitz_bound(a.term).str();
    j["nodes"] = a.term.dag_size();
    emit(j);
    return 0;
  }

  int certify_cmd() {
    require(o_.term, "--term");
    ConnectiveTerm t = term_from_formula(parse_formula(formula_text(o_.term), projection_vocabulary(o_.arity)), o_.arity);
    Oracle oracle;
    Rational lip(0);
    if (!o_.spec.empty()) {
      PLSpec s = io::plspec_from_json(io::read_json(o_.spec));
      oracle = {s.arity, [s](std::span<const Rational> x) { return s.eval(x); }};
      lip = s.lipschitz_constant();
    } else if (o_.target == "halfx") {
      oracle = {1, [](std::span<const Rational> x) { return x[0] / Rational(2); }};
      lip = Rational(1, 2);
    } else if (o_.target == "scale") {
      Rational factor = Rational(o_.scale_p);
      for (int i = 0; i < o_.scale_k; ++i) factor = factor / Rational(2);
      oracle = {1, [factor](std::span<const Rational> x) { return clamp01(factor * x[0]); }};
      lip = factor;
    } else {
      throw Usage("unknown --target '" + o_.target + "'");
    }
    if (!o_.lipschitz.empty()) lip = Rational::parse(o_.lipschitz);
    Rational h = spacing();
    Json j;
    j["bound"] = certify(t, oracle, h, lip).str();
    j["grid_error"] = grid_error(t, oracle, h).str();
    j["term_lipschitz"] = lipschitz_bound(t).str();
    j["h"] = h.str();
    j["L"] = lip.str();
    emit(j);
    return 0;
  }

  int relativize() {
    require(o_.formula, "--formula");
    Vocabulary v = vocabulary_option();
    Json j;
    if (!o_.relation.empty()) {
      Formula f = parse_formula(formula_text(o_.formula), v);
      FamilyRelativization r = relativize_family(f, o_.relation);
      j["formula"] = render(r.formula);
      j["parameter"] = r.parameter;
    } else {
      require(o_.pred, "--pred");
      Formula f = parse_formula(formula_text(o_.formula), v);
      j["formula"] = render(relativize_monadic(f, o_.pred));
    }
    emit(j);
    return 0;
  }

  int restrict_cmd() {
    require(o_.structure, "--struct");
    Structure m = io::load_structure(o_.structure);
    Restriction r;
    if (!o_.relation.empty()) {
      require(o_.at, "--at");
      r = try_restrict_to_family(m, o_.relation, m.element(o_.at));
    } else {
      require(o_.pred, "--pred");
      r = try_restrict_to_predicate(m, o_.pred);
    }
    if (!r.defined()) {
      emit(Json{{"defined", false}, {"kind", to_string(r.failure)}, {"reason", r.reason}});
      return 1;
    }
    emit(io::to_json(*r.structure));
    return 0;
  }

  int gen_order() {
    require(o_.pred, "--pred");
    require(o_.lt, "--lt");
    Vocabulary base = vocabulary_option();
    emit(io::to_json(order_theory({o_.pred, o_.lt}, base)));
    return 0;
  }

  int thicken_cmd() {
    require(o_.sigma, "--sigma");
    require(o_.delta, "--delta");
    Vocabulary v = vocabulary_option();
    TypeSet s = io::typeset_from_json(io::read_json(o_.sigma), v);
    std::optional<std::size_t> bound;
    if (o_.bound >= 0) bound = static_cast<std::size_t>(o_.bound);
    emit(io::to_json(thicken(s, Rational::parse(o_.delta), bound)));
    return 0;
  }

  int realizes_cmd() {
    require(o_.structure, "--struct");
    require(o_.type, "--type");
    Structure m = io::load_structure(o_.structure);
    TypeSet t = io::typeset_from_json(io::read_json(o_.type), m.vocabulary());
    Tuple tuple = element_list(m, o_.tuple);
    Evaluator ev(m);
    bool ok = realizes(ev, tuple, t);
    Json values = Json::array();
    for (const auto& f : t.formulas) values.push_back({{"formula", render(f)}, {"value", ev.eval(f, t.variables, tuple).str()}});
    emit(Json{{"realizes", ok}, {"tuple", io::tuple_json(m, tuple)}, {"values", values}});
    return ok ? 0 : 1;
  }

  int omits_cmd() {
    require(o_.structure, "--struct");
    require(o_.type, "--type");
    Structure m = io::load_structure(o_.structure);
    TypeSet t = io::typeset_from_json(io::read_json(o_.type), m.vocabulary());
    OmissionReport r = omits(m, t);
    Json j;
    j["omitted"] = r.omitted;
    if (r.omitted) {
      Json list = Json::array();
      for (const auto& w : r.witnesses) {
        list.push_back({{"tuple", io::tuple_json(m, w.tuple)},
                        {"formula", render(t.formulas[w.formula_index])},
                        {"value", w.value.str()}});
      }
      j["witnesses"] = list;
    } else {
      j["realizer"] = io::tuple_json(m, *r.realizer);
    }
    emit(j);
    return r.omitted ? 0 : 1;
  }

  int principal() {
    io::Family f = family();
    Vocabulary v = family_vocabulary(f);
    require(o_.sigma, "--sigma");
    Theory t = theory_option(v);
    TypeSet sigma = io::typeset_from_json(io::read_json(o_.sigma), v);
    if (!o_.metric.empty()) {
      Json spec = io::read_json(o_.metric);
      std::vector<Rational> deltas;
      for (const auto& d : spec.at("deltas")) deltas.push_back(io::rational_from_json(d));
      std::map<Rational, PrincipalCandidate> candidates;
      for (const auto& [key, c] : spec.at("candidates").items()) {
        candidates.emplace(Rational::parse(key), io::principal_candidate_from_json(c, v));
      }
      MetricPrincipalReport r = metrically_principal_check(f.structures, t, sigma, deltas, candidates);
      Json list = Json::array();
      for (const auto& verdict : r.verdicts) {
        Json item;
        item["delta"] = verdict.delta.str();
        item["holds"] = verdict.holds;
        item["thickened"] = io::to_json(verdict.thickened);
        if (verdict.generator) item["generator"] = io::to_json(*verdict.generator, f);
        if (verdict.omega) item["omega"] = io::to_json(*verdict.omega, f);
        list.push_back(item);
      }
      emit(Json{{"holds", r.holds}, {"verdicts", list}});
      return r.holds ? 0 : 1;
    }
    require(o_.phi, "--phi or --metric");
    PrincipalCandidate c = io::principal_candidate_from_json(io::read_json(o_.phi), v);
    if (const auto* g = std::get_if<GeneratorCandidate>(&c)) {
      GeneratorReport r = generator_check(f.structures, t, g->phi, sigma);
      emit(io::to_json(r, f));
      return r.holds ? 0 : 1;
    }
    OmegaReport r = omega_principal_check(f.structures, t, sigma, std::get<OmegaCandidate>(c));
    emit(io::to_json(r, f));
    return r.holds ? 0 : 1;
  }

  int omit(std::ostream& err) {
    require(o_.space, "--space");
    SearchSpace space = io::search_space_from_json(io::read_json(o_.space));
    Theory t = theory_option(space.vocabulary);
    std::vector<TypeSet> types;
    if (!o_.types.empty()) types = io::typesets_from_json(io::read_json(o_.types), space.vocabulary);
    SearchResult r = search_model(space, t, types, o_.workers);
    if (!r.model) {
      emit_text("EXHAUSTED " + std::to_string(r.examined) + "\n");
      return 1;
    }
    err << "examined " << r.examined << "\n";
    emit(io::to_json(*r.model));
    return 0;
  }

  TypeRecord record(const io::Family& f, const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw Usage("records are written structure:elements, got '" + text + "'");
    std::string which = text.substr(0, colon);
    std::size_t index = f.names.size();
    for (std::size_t i = 0; i < f.names.size(); ++i) {
      if (f.names[i] == which || fs::path(f.names[i]).stem() == which) index = i;
    }
    if (index == f.names.size()) {
      try {
        index = std::stoul(which);
      } catch (...) {
        throw Usage("unknown family member '" + which + "'");
      }
      if (index >= f.names.size()) throw Usage("family member index out of range: " + which);
    }
    return {index, element_list(f.structures[index], text.substr(colon + 1))};
  }

  int type_dist() {
    io::Family f = family();
    Vocabulary v = family_vocabulary(f);
    require(o_.p, "--p");
    require(o_.q, "--q");
    Theory t = theory_option(v);
    TypeRecord p = record(f, o_.p), q = record(f, o_.q);
    TypeSet corpus = o_.corpus.empty() ? default_corpus(v, static_cast<int>(p.tuple.size()), o_.corpus_grid)
                                       : io::typeset_from_json(io::read_json(o_.corpus), v);
    TypeDistance d = type_distance(f.structures, t, p, q, corpus);
    Json j{{"distance", d.distance.str()}, {"raw", d.raw.str()}, {"common_model", d.common_model}};
    if (!d.common_model) j["convention"] = "no common model realizes both records; raw distance is the diameter bound 1";
    emit(j);
    return 0;
  }

  int combine_cmd() {
    require(o_.m0, "--m0");
    require(o_.m1, "--m1");
    emit(io::to_json(combine(io::load_structure(o_.m0), io::load_structure(o_.m1))));
    return 0;
  }

  int reduct_cmd() {
    require(o_.structure, "--struct");
    Structure m = io::load_structure(o_.structure);
    Vocabulary sub;
    if (!o_.signature.empty()) {
      sub = io::load_signature(o_.signature).vocabulary;
    } else {
      Vocabulary full = m.vocabulary();
      for (const auto& name : split_list(o_.keep)) {
        if (auto a = full.predicate_arity(name)) {
          sub.add_predicate(name, *a);
        } else if (auto b = full.operation_arity(name)) {
          sub.add_operation(name, *b);
        } else {
          throw Error(ErrorKind::VocabularyMismatch, "structure has no symbol '" + name + "'");
        }
      }
    }
    emit(io::to_json(reduct(m, sub)));
    return 0;
  }

  int rename_cmd() {
    require(o_.structure, "--struct");
    Structure m = io::load_structure(o_.structure);
    Renaming r;
    for (const auto& item : split_list(o_.map)) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw Usage("--map expects old=new pairs, got '" + item + "'");
      r.map[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
    emit(io::to_json(rename(m, r)));
    return 0;
  }

  int lipschitz() {
    require(o_.structure, "--struct");
    ValidationReport r = lipschitz_check(io::load_structure(o_.structure));
    emit(io::to_json(r));
    return r.pass() ? 0 : 1;
  }

private:
  Options& o_;
  std::ostream& out_;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact evaluation and model checking for basic continuous logic", "pavelka"};
  app.require_subcommand(1);
  app.add_option("--workers", o.workers, "worker threads for model search (PAVELKA_WORKERS overrides)");
  app.add_option("--out", o.out, "write the result to this file instead of stdout");

  std::map<std::string, std::function<int()>> handlers;
  Runner r(o, out);
  auto sub = [&](const char* name, const char* help, std::function<int()> fn) {
    handlers[name] = std::move(fn);
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  auto* validate = sub("validate", "check metric axioms, ranges and moduli", [&] { return r.validate(); });
  validate->add_option("--struct", o.structure)->required();
  validate->add_option("--sig", o.signature);

  auto* ev = sub("eval", "print the exact truth value of a formula", [&] { return r.eval_cmd(); });
  ev->add_option("--struct", o.structure)->required();
  ev->add_option("--formula", o.formula, "formula text, or a file holding it")->required();
  ev->add_option("--assign", o.assign, "var=element");

  auto* check = sub("check", "check a theory in a structure", [&] { return r.check(); });
  check->add_option("--struct", o.structure)->required();
  check->add_option("--theory", o.theory)->required();

  auto* ent = sub("entails", "finite-family entailment between type sets", [&] { return r.entails_cmd(); });
  ent->add_option("--family", o.family)->required();
  ent->add_option("--theory", o.theory);
  ent->add_option("--gamma", o.gamma)->required();
  ent->add_option("--sigma", o.sigma)->required();
  ent->add_option("--sig", o.signature);

  auto* tv = sub("tv-test", "finite Tarski-Vaught witness check", [&] { return r.tv_test(); });
  tv->add_option("--struct", o.structure)->required();
  tv->add_option("--subset", o.subset, "comma-separated elements (default: all)");
  tv->add_option("--formulas", o.formulas, "JSON array or one formula per line")->required();
  tv->add_option("--grid", o.grid, "comma-separated rationals in (0,1)")->required();

  auto* ap = sub("approx", "build an approximating connective term", [&] { return r.approx(); });
  ap->add_option("--target", o.target, "halfx or scale");
  ap->add_option("--spec", o.spec, "lattice target as JSON");
  ap->add_option("--n", o.n);
  ap->add_option("--p", o.scale_p);
  ap->add_option("--k", o.scale_k);
  ap->add_option("--spacing", o.h, "grid spacing (default 1/(8n))");

  auto* cert = sub("certify", "certified sup-error bound of a term", [&] { return r.certify_cmd(); });
  cert->add_option("--term", o.term, "term over x1..xn, or a file holding it")->required();
  cert->add_option("--arity", o.arity);
  cert->add_option("--target", o.target, "halfx or scale");
  cert->add_option("--spec", o.spec);
  cert->add_option("--p", o.scale_p);
  cert->add_option("--k", o.scale_k);
  cert->add_option("--n", o.n);
  cert->add_option("--spacing", o.h);
  cert->add_option("--L", o.lipschitz, "Lipschitz bound of the target");

  auto* rel = sub("relativize", "relativize a formula to a predicate", [&] { return r.relativize(); });
  rel->add_option("--formula", o.formula)->required();
  rel->add_option("--pred", o.pred);
  rel->add_option("--relation", o.relation, "binary relation for family relativization");
  rel->add_option("--sig", o.signature);
  rel->add_option("--struct", o.structure);

  auto* res = sub("restrict", "restrict a structure to a discrete predicate", [&] { return r.restrict_cmd(); });
  res->add_option("--struct", o.structure)->required();
  res->add_option("--pred", o.pred);
  res->add_option("--relation", o.relation);
  res->add_option("--at", o.at);

  auto* order = sub("gen-order", "emit the discrete linear ordering theory", [&] { return r.gen_order(); });
  order->add_option("--pred", o.pred)->required();
  order->add_option("--lt", o.lt)->required();
  order->add_option("--sig", o.signature, "base vocabulary the names must avoid");

  auto* thick = sub("thicken", "build the delta-thickening of a type", [&] { return r.thicken_cmd(); });
  thick->add_option("--sigma", o.sigma)->required();
  thick->add_option("--delta", o.delta)->required();
  thick->add_option("--bound", o.bound);
  thick->add_option("--sig", o.signature);
  thick->add_option("--struct", o.structure);

  auto* real = sub("realizes", "does a tuple realize a type", [&] { return r.realizes_cmd(); });
  real->add_option("--struct", o.structure)->required();
  real->add_option("--type", o.type)->required();
  real->add_option("--tuple", o.tuple)->required();

  auto* om = sub("omits", "does a structure omit a type", [&] { return r.omits_cmd(); });
  om->add_option("--struct", o.structure)->required();
  om->add_option("--type", o.type)->required();

  auto* pr = sub("principal", "generator, omega- or metric principality check", [&] { return r.principal(); });
  pr->add_option("--family", o.family)->required();
  pr->add_option("--theory", o.theory);
  pr->add_option("--sigma", o.sigma)->required();
  pr->add_option("--phi", o.phi);
  pr->add_option("--metric", o.metric, "deltas and candidates for the metric check");
  pr->add_option("--sig", o.signature);

  auto* omit = sub("omit", "search for a model omitting types", [&] { return r.omit(err); });
  omit->add_option("--space", o.space)->required();
  omit->add_option("--theory", o.theory);
  omit->add_option("--types", o.types);
  omit->add_option("--workers", o.workers);

  auto* td = sub("type-dist", "distance between type records", [&] { return r.type_dist(); });
  td->add_option("--family", o.family)->required();
  td->add_option("--theory", o.theory);
  td->add_option("--p", o.p, "structure:elements")->required();
  td->add_option("--q", o.q, "structure:elements")->required();
  td->add_option("--grid", o.corpus_grid, "grid of the default corpus");
  td->add_option("--corpus", o.corpus);
  td->add_option("--sig", o.signature);

  auto* comb = sub("combine", "combined structure [M0,M1]", [&] { return r.combine_cmd(); });
  comb->add_option("--m0", o.m0)->required();
  comb->add_option("--m1", o.m1)->required();

  auto* red = sub("reduct", "drop symbols from a structure", [&] { return r.reduct_cmd(); });
  red->add_option("--struct", o.structure)->required();
  red->add_option("--keep", o.keep, "comma-separated symbols to keep");
  red->add_option("--sig", o.signature);

  auto* ren = sub("rename", "rename symbols of a structure", [&] { return r.rename_cmd(); });
  ren->add_option("--struct", o.structure)->required();
  ren->add_option("--map", o.map, "old=new,...")->required();

  auto* lip = sub("lipschitz", "check that every symbol is 1-Lipschitz", [&] { return r.lipschitz(); });
  lip->add_option("--struct", o.structure)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (const char* env = std::getenv("PAVELKA_WORKERS")) {
    try {
      o.workers = std::stoi(env);
    } catch (...) {
      err << "error: PAVELKA_WORKERS must be an integer\n";
      return 2;
    }
  }
  if (o.workers < 1) {
    err << "error: worker count must be positive\n";
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return handlers.at(name)();
  } catch (const Usage& e) {
    err << "error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

} // namespace pavelka::cli
