#include "pavelka/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pavelka/error.hpp"

namespace pavelka::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

Json read_json(const fs::path& path) {
  std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Syntax, path.string() + ": " + e.what(), e.byte);
  }
}

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw Error(ErrorKind::InvalidArgument, "expected a rational written as a string, got " + j.dump());
}

Json to_json(const Rational& r) { return r.str(); }

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidArgument, std::string("missing key \"") + key + "\"");
  return j.at(key);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t at = s.find(sep, start);
    out.push_back(s.substr(start, at - start));
    if (at == std::string::npos) break;
    start = at + 1;
  }
  return out;
}

Tuple parse_tuple_key(const Structure& m, const std::string& key) {
  Tuple t;
  for (const auto& name : split(key, ',')) t.push_back(m.element(name));
  return t;
}

std::string tuple_key(const Structure& m, const Tuple& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ',';
    s += m.name(t[i]);
  }
  return s;
}

int arity_of_table(const std::string& symbol, const Json& table) {
  if (!table.is_object()) return 0;
  if (table.empty()) throw Error(ErrorKind::InvalidArgument, "table for '" + symbol + "' is empty");
  int arity = -1;
  for (const auto& [key, value] : table.items()) {
    int a = key.empty() ? 0 : static_cast<int>(split(key, ',').size());
    if (arity >= 0 && a != arity) throw Error(ErrorKind::ArityMismatch, "table for '" + symbol + "' mixes arities");
    arity = a;
  }
  return arity;
}

} // namespace

Structure structure_from_json(const Json& j) {
  const Json& universe = require(j, "universe");
  if (!universe.is_array()) throw Error(ErrorKind::InvalidArgument, "\"universe\" must be an array");
  std::vector<std::string> names;
  for (const auto& e : universe) names.push_back(e.get<std::string>());
  Structure m(names);
  const std::size_t n = m.size();

  std::vector<std::vector<std::optional<Rational>>> given(n, std::vector<std::optional<Rational>>(n));
  if (j.contains("metric")) {
    for (const auto& [key, value] : j.at("metric").items()) {
      Tuple t = parse_tuple_key(m, key);
      if (t.size() != 2) throw Error(ErrorKind::InvalidArgument, "metric key \"" + key + "\" is not a pair");
      given[t[0]][t[1]] = rational_from_json(value);
    }
  }
  for (Element a = 0; a < n; ++a) {
    for (Element b = 0; b < n; ++b) {
      if (a == b) {
        m.set_distance(a, b, given[a][b].value_or(Rational(0)));
      } else if (given[a][b]) {
        m.set_distance(a, b, *given[a][b]);
      } else if (given[b][a]) {
        m.set_distance(a, b, *given[b][a]);
      } else {
        throw Error(ErrorKind::InvalidArgument, "metric has no entry for " + m.name(a) + "," + m.name(b));
      }
    }
  }

  if (j.contains("predicates")) {
    for (const auto& [symbol, table] : j.at("predicates").items()) {
      if (!is_identifier(symbol) || is_reserved(symbol)) {
        throw Error(ErrorKind::InvalidArgument, "invalid predicate name '" + symbol + "'");
      }
      const int arity = arity_of_table(symbol, table);
      m.add_predicate(symbol, arity);
      if (!table.is_object()) {
        m.set_predicate(symbol, {}, rational_from_json(table));
        continue;
      }
      std::vector<bool> seen(m.tuple_count(arity), false);
      for (const auto& [key, value] : table.items()) {
        Tuple t = parse_tuple_key(m, key);
        seen[Structure::tuple_index(t, n)] = true;
        m.set_predicate(symbol, t, rational_from_json(value));
      }
      auto missing = std::find(seen.begin(), seen.end(), false);
      if (missing != seen.end()) {
        throw Error(ErrorKind::InvalidArgument,
                    "predicate '" + symbol + "' has no value at (" +
                        tuple_key(m, m.tuple_at(static_cast<std::size_t>(missing - seen.begin()), arity)) + ")");
      }
    }
  }
  auto read_operation = [&](const std::string& symbol, const Json& table) {
    if (!is_identifier(symbol) || is_reserved(symbol)) {
      throw Error(ErrorKind::InvalidArgument, "invalid operation name '" + symbol + "'");
    }
    if (table.is_string()) {
      m.add_constant(symbol, m.element(table.get<std::string>()));
      return;
    }
    const int arity = arity_of_table(symbol, table);
    m.add_operation(symbol, arity);
    std::vector<bool> seen(m.tuple_count(arity), false);
    for (const auto& [key, value] : table.items()) {
      Tuple t = parse_tuple_key(m, key);
      seen[Structure::tuple_index(t, n)] = true;
      m.set_operation(symbol, t, m.element(value.get<std::string>()));
    }
    auto missing = std::find(seen.begin(), seen.end(), false);
    if (missing != seen.end()) {
      throw Error(ErrorKind::InvalidArgument,
                  "operation '" + symbol + "' has no value at (" +
                      tuple_key(m, m.tuple_at(static_cast<std::size_t>(missing - seen.begin()), arity)) + ")");
    }
  };
  if (j.contains("operations")) {
    for (const auto& [symbol, table] : j.at("operations").items()) read_operation(symbol, table);
  }
  if (j.contains("constants")) {
    for (const auto& [symbol, value] : j.at("constants").items()) {
      if (!value.is_string()) throw Error(ErrorKind::InvalidArgument, "constant '" + symbol + "' must name an element");
      read_operation(symbol, value);
    }
  }
  return m;
}

Json to_json(const Structure& m) {
  Json j;
  j["universe"] = m.universe();
  Json metric = Json::object();
  for (Element a = 0; a < m.size(); ++a) {
    for (Element b = a + 1; b < m.size(); ++b) {
      metric[m.name(a) + "," + m.name(b)] = m.distance(a, b).str();
      if (m.distance(a, b) != m.distance(b, a)) metric[m.name(b) + "," + m.name(a)] = m.distance(b, a).str();
    }
  }
  j["metric"] = metric;
  Json preds = Json::object();
  for (const auto& [name, table] : m.predicates()) {
    Json t = Json::object();
    for (std::size_t i = 0; i < table.values.size(); ++i) t[tuple_key(m, m.tuple_at(i, table.arity))] = table.values[i].str();
    preds[name] = t;
  }
  j["predicates"] = preds;
  Json ops = Json::object();
  Json consts = Json::object();
  for (const auto& [name, table] : m.operations()) {
    if (table.arity == 0) {
      consts[name] = m.name(table.values[0]);
      continue;
    }
    Json t = Json::object();
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      t[tuple_key(m, m.tuple_at(i, table.arity))] = m.name(table.values[i]);
    }
    ops[name] = t;
  }
  j["operations"] = ops;
  j["constants"] = consts;
  return j;
}

Structure load_structure(const fs::path& path) {
  try {
    return structure_from_json(read_json(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what(), e.position());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
  }
}

Vocabulary vocabulary_from_json(const Json& j) {
  Vocabulary v;
  if (j.contains("predicates")) {
    for (const auto& [name, arity] : j.at("predicates").items()) v.add_predicate(name, arity.get<int>());
  }
  if (j.contains("operations")) {
    for (const auto& [name, arity] : j.at("operations").items()) v.add_operation(name, arity.get<int>());
  }
  if (j.contains("constants")) {
    for (const auto& c : j.at("constants")) v.add_constant(c.get<std::string>());
  }
  return v;
}

Json to_json(const Vocabulary& v) {
  Json j;
  Json preds = Json::object(), ops = Json::object(), consts = Json::array();
  for (const auto& [name, arity] : v.predicates()) preds[name] = arity;
  for (const auto& [name, arity] : v.operations()) {
    if (arity == 0) {
      consts.push_back(name);
    } else {
      ops[name] = arity;
    }
  }
  j["predicates"] = preds;
  j["operations"] = ops;
  j["constants"] = consts;
  return j;
}

Signature signature_from_json(const Json& j) {
  Signature s;
  s.vocabulary = vocabulary_from_json(j);
  if (j.contains("moduli")) {
    for (const auto& [name, samples] : j.at("moduli").items()) {
      auto& list = s.moduli[name];
      for (const auto& pair : samples) {
        if (!pair.is_array() || pair.size() != 2) {
          throw Error(ErrorKind::InvalidArgument, "modulus sample for '" + name + "' must be [epsilon, delta]");
        }
        list.push_back({rational_from_json(pair[0]), rational_from_json(pair[1])});
      }
    }
  }
  s.check();
  return s;
}

Signature load_signature(const fs::path& path) {
  if (path.extension() != ".json") {
    Signature s;
    s.vocabulary = Vocabulary::parse(read_file(path));
    return s;
  }
  return signature_from_json(read_json(path));
}

namespace {

Formula formula_from_json(const Json& j, const Vocabulary& v) {
  if (!j.is_string()) throw Error(ErrorKind::InvalidArgument, "formulas must be strings, got " + j.dump());
  return parse_formula(j.get<std::string>(), v);
}

} // namespace

Theory theory_from_json(const Json& j, const Vocabulary& v) {
  Theory t;
  const Json* list = &j;
  if (j.is_object()) {
    t.name = j.value("name", "");
    list = &require(j, "sentences");
  }
  for (const auto& s : *list) {
    Formula f = formula_from_json(s, v);
    if (!is_sentence(f)) throw Error(ErrorKind::NotSentence, "theory member is not a sentence: " + s.get<std::string>());
    t.sentences.push_back(f);
  }
  return t;
}

Json to_json(const Theory& t) {
  Json j;
  j["name"] = t.name;
  Json list = Json::array();
  for (const auto& s : t.sentences) list.push_back(render(s));
  j["sentences"] = list;
  return j;
}

TypeSet typeset_from_json(const Json& j, const Vocabulary& v) {
  TypeSet t;
  t.name = j.value("name", "");
  for (const auto& x : require(j, "variables")) t.variables.push_back(x.get<std::string>());
  for (const auto& f : require(j, "formulas")) t.formulas.push_back(formula_from_json(f, v));
  t.check();
  return t;
}

Json to_json(const TypeSet& t) {
  Json j;
  j["name"] = t.name;
  j["variables"] = t.variables;
  Json list = Json::array();
  for (const auto& f : t.formulas) list.push_back(render(f));
  j["formulas"] = list;
  return j;
}

std::vector<TypeSet> typesets_from_json(const Json& j, const Vocabulary& v) {
  const Json& list = j.is_object() ? require(j, "types") : j;
  std::vector<TypeSet> out;
  for (const auto& t : list) out.push_back(typeset_from_json(t, v));
  return out;
}

SearchSpace search_space_from_json(const Json& j) {
  SearchSpace s;
  s.vocabulary = vocabulary_from_json(require(j, "vocabulary"));
  s.max_size = require(j, "max_size").get<int>();
  s.truth_grid = require(j, "truth_grid").get<int>();
  s.metric_grid = j.value("metric_grid", 1);
  s.seed = j.value("seed", std::uint64_t{0});
  s.check();
  return s;
}

PLSpec plspec_from_json(const Json& j) {
  PLSpec s;
  s.arity = require(j, "arity").get<int>();
  for (const auto& g : require(j, "groups")) {
    std::vector<AffinePiece> group;
    for (const auto& p : g) {
      AffinePiece piece;
      for (const auto& c : require(p, "coefficients")) piece.coefficients.push_back(rational_from_json(c));
      piece.intercept = p.contains("intercept") ? rational_from_json(p.at("intercept")) : Rational(0);
      group.push_back(std::move(piece));
    }
    s.groups.push_back(std::move(group));
  }
  s.check();
  return s;
}

OmegaCandidate omega_candidate_from_json(const Json& j, const Vocabulary& v) {
  std::vector<std::string> variables;
  std::vector<Term> terms;
  for (const auto& y : require(j, "variables")) variables.push_back(y.get<std::string>());
  for (const auto& t : require(j, "terms")) terms.push_back(parse_term(t.get<std::string>(), v));
  return OmegaCandidate{variables, terms, formula_from_json(require(j, "formula"), v), rational_from_json(require(j, "r"))};
}

PrincipalCandidate principal_candidate_from_json(const Json& j, const Vocabulary& v) {
  if (j.value("kind", "generator") == "omega") return omega_candidate_from_json(j, v);
  return GeneratorCandidate{typeset_from_json(j, v)};
}

Vocabulary Family::vocabulary() const {
  Vocabulary v;
  for (const auto& m : structures) v = v.merged(m.vocabulary());
  return v;
}

Family load_family(const fs::path& path) {
  Family f;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      f.names.push_back(file.filename().string());
      f.structures.push_back(load_structure(file));
    }
    return f;
  }
  Json j = read_json(path);
  const Json& list = j.is_object() ? require(j, "structures") : j;
  for (std::size_t i = 0; i < list.size(); ++i) {
    f.names.push_back(std::to_string(i));
    f.structures.push_back(structure_from_json(list[i]));
  }
  return f;
}

Json tuple_json(const Structure& m, std::span<const Element> tuple) {
  Json j = Json::array();
  for (Element e : tuple) j.push_back(m.name(e));
  return j;
}

Json to_json(const ValidationReport& r) {
  Json j;
  j["pass"] = r.pass();
  Json list = Json::array();
  for (const auto& v : r.violations) {
    Json item;
    item["kind"] = v.kind;
    if (!v.symbol.empty()) item["symbol"] = v.symbol;
    item["witness"] = v.witness;
    item["values"] = v.values;
    list.push_back(item);
  }
  j["violations"] = list;
  return j;
}

Json to_json(const TheoryReport& r) {
  Json j;
  j["satisfied"] = r.satisfied;
  Json list = Json::array();
  for (const auto& f : r.failing) list.push_back({{"index", f.index}, {"sentence", render(f.sentence)}, {"value", f.value.str()}});
  j["failing"] = list;
  return j;
}

Json to_json(const EntailmentResult& r, const Family& family) {
  Json j;
  j["holds"] = r.holds;
  if (r.counterexample) {
    const auto& c = *r.counterexample;
    const Structure& m = family.structures.at(c.structure_index);
    j["counterexample"] = {{"structure", family.names.at(c.structure_index)},
                           {"tuple", tuple_json(m, c.tuple)},
                           {"formula", render(c.formula)},
                           {"value", c.value.str()}};
  }
  return j;
}

Json to_json(const GeneratorReport& r, const Family& family) {
  Json j;
  j["holds"] = r.holds;
  j["satisfiable"] = r.satisfiable;
  if (r.realization) {
    const Structure& m = family.structures.at(r.realization->first);
    j["realization"] = {{"structure", family.names.at(r.realization->first)},
                        {"tuple", tuple_json(m, r.realization->second)}};
  }
  if (!r.satisfiable) {
    Json list = Json::array();
    for (const auto& u : r.unsatisfiable) {
      Json item;
      item["structure"] = family.names.at(u.structure_index);
      if (u.theory_failure) {
        item["sentence"] = render(u.theory_failure->sentence);
        item["value"] = u.theory_failure->value.str();
      } else {
        Json tuples = Json::array();
        const Structure& m = family.structures.at(u.structure_index);
        for (const auto& w : u.tuples) {
          tuples.push_back({{"tuple", tuple_json(m, w.tuple)}, {"formula_index", w.formula_index}, {"value", w.value.str()}});
        }
        item["tuples"] = tuples;
      }
      list.push_back(item);
    }
    j["unsatisfiable"] = list;
  }
  j["entailment"] = to_json(r.entailment, family);
  return j;
}

Json to_json(const OmegaReport& r, const Family& family) {
  Json j;
  j["holds"] = r.holds;
  j["substituted"] = to_json(r.substituted);
  j["generator"] = to_json(r.generator, family);
  j["threshold"] = to_json(r.threshold, family);
  return j;
}

} // namespace pavelka::io
