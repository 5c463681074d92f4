#include <algorithm>
#include <set>

#include "pavelka/error.hpp"
#include "pavelka/structure.hpp"

namespace pavelka {

namespace {

std::vector<std::string> names_of(const Structure& m, std::span<const Element> tuple) {
  std::vector<std::string> out;
  out.reserve(tuple.size());
  for (Element e : tuple) out.push_back(m.name(e));
  return out;
}

Rational tuple_distance(const Structure& m, const Tuple& a, const Tuple& b) {
  Rational d(0);
  for (std::size_t i = 0; i < a.size(); ++i) d = max(d, m.distance(a[i], b[i]));
  return d;
}

void check_metric(const Structure& m, ValidationReport& report) {
  const auto n = static_cast<Element>(m.size());
  for (Element a = 0; a < n; ++a) {
    for (Element b = 0; b < n; ++b) {
      const Rational& d = m.distance(a, b);
      if (!d.in_unit_interval()) {
        report.violations.push_back({"range", "d", names_of(m, std::vector<Element>{a, b}), {d.str()}});
        continue;
      }
      if (a == b && d.sign() != 0) {
        report.violations.push_back({"metric-zero", "", {m.name(a)}, {d.str()}});
      }
      if (a < b && d != m.distance(b, a)) {
        report.violations.push_back(
            {"metric-symmetry", "", {m.name(a), m.name(b)}, {d.str(), m.distance(b, a).str()}});
      }
      if (a != b && d.sign() == 0) {
        report.violations.push_back({"metric-identity", "", {m.name(a), m.name(b)}, {d.str()}});
      }
    }
  }
  for (Element a = 0; a < n; ++a) {
    for (Element b = 0; b < n; ++b) {
      for (Element c = 0; c < n; ++c) {
        const Rational& ac = m.distance(a, c);
        Rational via = m.distance(a, b) + m.distance(b, c);
        if (ac > via) {
          report.violations.push_back({"metric-triangle", "", {m.name(a), m.name(b), m.name(c)},
                                       {ac.str(), m.distance(a, b).str(), m.distance(b, c).str()}});
        }
      }
    }
  }
}

void check_ranges(const Structure& m, ValidationReport& report) {
  for (const auto& [name, table] : m.predicates()) {
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      if (!table.values[i].in_unit_interval()) {
        report.violations.push_back({"range", name, names_of(m, m.tuple_at(i, table.arity)), {table.values[i].str()}});
      }
    }
  }
}

std::vector<Tuple> all_tuples(const Structure& m, int arity) {
  std::vector<Tuple> out;
  for_each_tuple(m.size(), arity, [&](const Tuple& t) { out.push_back(t); });
  return out;
}

std::vector<std::string> pair_witness(const Structure& m, const Tuple& a, const Tuple& b) {
  auto w = names_of(m, a);
  auto wb = names_of(m, b);
  w.insert(w.end(), wb.begin(), wb.end());
  return w;
}

} // namespace

ValidationReport validate_metric_and_ranges(const Structure& m) {
  ValidationReport report;
  check_metric(m, report);
  check_ranges(m, report);
  return report;
}

ValidationReport validate_structure(const Structure& m, const Signature& signature) {
  signature.check();
  Vocabulary mv = m.vocabulary();
  if (!(mv == signature.vocabulary)) {
    for (const auto& [name, arity] : signature.vocabulary.predicates()) {
      if (mv.predicate_arity(name) != arity) {
        throw Error(ErrorKind::VocabularyMismatch, "structure lacks predicate '" + name + "'/" + std::to_string(arity));
      }
    }
    for (const auto& [name, arity] : signature.vocabulary.operations()) {
      if (mv.operation_arity(name) != arity) {
        throw Error(ErrorKind::VocabularyMismatch, "structure lacks operation '" + name + "'/" + std::to_string(arity));
      }
    }
    for (const auto& [name, arity] : mv.predicates()) {
      if (!signature.vocabulary.contains(name)) {
        throw Error(ErrorKind::VocabularyMismatch, "structure has extra predicate '" + name + "'");
      }
    }
    for (const auto& [name, arity] : mv.operations()) {
      if (!signature.vocabulary.contains(name)) {
        throw Error(ErrorKind::VocabularyMismatch, "structure has extra operation '" + name + "'");
      }
    }
  }

  ValidationReport report = validate_metric_and_ranges(m);

  for (const auto& [symbol, samples] : signature.moduli) {
    if (samples.empty()) continue;
    const bool is_pred = m.predicates().count(symbol) > 0;
    const int arity = is_pred ? m.predicate_table(symbol).arity : m.operation_table(symbol).arity;
    const auto tuples = all_tuples(m, arity);
    for (const Modulus& mod : samples) {
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        for (std::size_t j = i + 1; j < tuples.size(); ++j) {
          const Tuple& a = tuples[i];
          const Tuple& b = tuples[j];
          if (!(tuple_distance(m, a, b) < mod.delta)) continue;
          Rational gap = is_pred ? abs(m.predicate(symbol, a) - m.predicate(symbol, b))
                                 : m.distance(m.operation(symbol, a), m.operation(symbol, b));
          if (gap > mod.epsilon) {
            report.violations.push_back({"modulus", symbol, pair_witness(m, a, b),
                                         {gap.str(), mod.epsilon.str(), mod.delta.str()}});
          }
        }
      }
    }
  }
  return report;
}

ValidationReport lipschitz_check(const Structure& m) {
  ValidationReport report;
  auto scan = [&](const std::string& symbol, int arity, bool is_pred) {
    const auto tuples = all_tuples(m, arity);
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      for (std::size_t j = i + 1; j < tuples.size(); ++j) {
        const Tuple& a = tuples[i];
        const Tuple& b = tuples[j];
        Rational bound = tuple_distance(m, a, b);
        Rational gap = is_pred ? abs(m.predicate(symbol, a) - m.predicate(symbol, b))
                               : m.distance(m.operation(symbol, a), m.operation(symbol, b));
        if (gap > bound) {
          report.violations.push_back({"lipschitz", symbol, pair_witness(m, a, b), {gap.str(), bound.str()}});
        }
      }
    }
  };
  for (const auto& [name, table] : m.predicates()) scan(name, table.arity, true);
  for (const auto& [name, table] : m.operations()) scan(name, table.arity, false);
  return report;
}

Structure reduct(const Structure& m, const Vocabulary& sub) {
  if (!sub.is_subvocabulary_of(m.vocabulary())) {
    throw Error(ErrorKind::VocabularyMismatch, "reduct vocabulary is not a subvocabulary of the structure's");
  }
  Structure out = m;
  for (const auto& [name, table] : m.predicates()) {
    if (!sub.contains(name)) out.remove_symbol(name);
  }
  for (const auto& [name, table] : m.operations()) {
    if (!sub.contains(name)) out.remove_symbol(name);
  }
  return out;
}

Renaming Renaming::completed(const Vocabulary& vocabulary) const {
  Renaming out = *this;
  for (const auto& [name, arity] : vocabulary.predicates()) out.map.emplace(name, name);
  for (const auto& [name, arity] : vocabulary.operations()) out.map.emplace(name, name);
  return out;
}

void Renaming::check(const Vocabulary& vocabulary) const {
  std::set<std::string> targets;
  for (const auto& [from, to] : map) {
    if (!vocabulary.contains(from)) {
      throw Error(ErrorKind::InvalidArgument, "renaming mentions unknown symbol '" + from + "'");
    }
    if (!is_identifier(to) || is_reserved(to)) {
      throw Error(ErrorKind::InvalidArgument, "invalid target name '" + to + "' in renaming");
    }
    if (!targets.insert(to).second) {
      throw Error(ErrorKind::InvalidArgument, "renaming is not injective: '" + to + "' used twice");
    }
  }
  auto total = [&](const std::map<std::string, int>& symbols) {
    for (const auto& [name, arity] : symbols) {
      if (!map.count(name)) throw Error(ErrorKind::InvalidArgument, "renaming is not total: missing '" + name + "'");
    }
  };
  total(vocabulary.predicates());
  total(vocabulary.operations());
}

Structure rename(const Structure& m, const Renaming& renaming) {
  Renaming rho = renaming.completed(m.vocabulary());
  rho.check(m.vocabulary());
  Structure out(m.universe());
  for (Element a = 0; a < m.size(); ++a) {
    for (Element b = 0; b < m.size(); ++b) out.set_distance(a, b, m.distance(a, b));
  }
  for (const auto& [name, table] : m.predicates()) {
    const std::string& target = rho.map.at(name);
    out.add_predicate(target, table.arity);
    out.predicate_table(target) = table;
  }
  for (const auto& [name, table] : m.operations()) {
    const std::string& target = rho.map.at(name);
    out.add_operation(target, table.arity);
    out.operation_table(target) = table;
  }
  return out;
}

Signature rename(const Signature& s, const Renaming& renaming) {
  Renaming rho = renaming.completed(s.vocabulary);
  rho.check(s.vocabulary);
  Signature out;
  for (const auto& [name, arity] : s.vocabulary.predicates()) out.vocabulary.add_predicate(rho.map.at(name), arity);
  for (const auto& [name, arity] : s.vocabulary.operations()) out.vocabulary.add_operation(rho.map.at(name), arity);
  for (const auto& [name, samples] : s.moduli) out.moduli[rho.map.at(name)] = samples;
  return out;
}

Structure induced_substructure(const Structure& m, std::span<const Element> subset) {
  std::vector<Element> keep(subset.begin(), subset.end());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.empty()) throw Error(ErrorKind::EmptyRestriction, "substructure universe would be empty");
  std::vector<std::int64_t> position(m.size(), -1);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= m.size()) throw Error(ErrorKind::InvalidArgument, "element index out of range");
    position[keep[i]] = static_cast<std::int64_t>(i);
    names.push_back(m.name(keep[i]));
  }
  Structure out(names);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = 0; j < keep.size(); ++j) {
      out.set_distance(static_cast<Element>(i), static_cast<Element>(j), m.distance(keep[i], keep[j]));
    }
  }
  for (const auto& [name, table] : m.predicates()) {
    out.add_predicate(name, table.arity);
    for_each_tuple(keep.size(), table.arity, [&](const Tuple& t) {
      Tuple src(t.size());
      for (std::size_t k = 0; k < t.size(); ++k) src[k] = keep[t[k]];
      out.set_predicate(name, t, m.predicate(name, src));
    });
  }
  for (const auto& [name, table] : m.operations()) {
    out.add_operation(name, table.arity);
    for_each_tuple(keep.size(), table.arity, [&](const Tuple& t) {
      Tuple src(t.size());
      for (std::size_t k = 0; k < t.size(); ++k) src[k] = keep[t[k]];
      Element value = m.operation(name, src);
      if (position[value] < 0) {
        throw Error(ErrorKind::OperationEscapes,
                    "operation '" + name + "' maps (" + [&] {
                      std::string s;
                      for (std::size_t k = 0; k < src.size(); ++k) s += (k ? "," : "") + m.name(src[k]);
                      return s;
                    }() + ") to " + m.name(value) + " outside the subset");
      }
      out.set_operation(name, t, static_cast<Element>(position[value]));
    });
  }
  return out;
}

std::vector<Element> generated_closure(const Structure& m, std::span<const Element> seed) {
  std::vector<bool> in(m.size(), false);
  for (Element e : seed) {
    if (e >= m.size()) throw Error(ErrorKind::InvalidArgument, "element index out of range");
    in[e] = true;
  }
  for (const auto& [name, table] : m.operations()) {
    if (table.arity == 0) in[table.values[0]] = true;
  }
  if (std::none_of(in.begin(), in.end(), [](bool b) { return b; })) {
    throw Error(ErrorKind::EmptyRestriction, "generating set is empty and the vocabulary has no constants");
  }
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Element> current;
    for (Element e = 0; e < m.size(); ++e) {
      if (in[e]) current.push_back(e);
    }
    for (const auto& [name, table] : m.operations()) {
      if (table.arity == 0) continue;
      // Enumerate tuples over the current set only.
      for_each_tuple(current.size(), table.arity, [&](const Tuple& t) {
        Tuple src(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) src[k] = current[t[k]];
        Element v = m.operation(name, src);
        if (!in[v]) {
          in[v] = true;
          changed = true;
        }
      });
    }
  }
  std::vector<Element> out;
  for (Element e = 0; e < m.size(); ++e) {
    if (in[e]) out.push_back(e);
  }
  return out;
}

Structure generated_substructure(const Structure& m, std::span<const Element> seed) {
  auto closure = generated_closure(m, seed);
  return induced_substructure(m, closure);
}

std::string component_symbol(const std::string& symbol, int component) {
  return symbol + "_" + std::to_string(component);
}

std::string membership_predicate(int component) { return "P" + std::to_string(component); }

std::string component_element(const std::string& element, int component) {
  return std::to_string(component) + ":" + element;
}

Renaming component_renaming(const Vocabulary& vocabulary, int component) {
  Renaming r;
  for (const auto& [name, arity] : vocabulary.predicates()) r.map[name] = component_symbol(name, component);
  for (const auto& [name, arity] : vocabulary.operations()) r.map[name] = component_symbol(name, component);
  return r;
}

Structure combine(const Structure& m0, const Structure& m1) {
  if (!(m0.vocabulary() == m1.vocabulary())) {
    throw Error(ErrorKind::VocabularyMismatch, "combine requires both structures over the same vocabulary");
  }
  const Structure* parts[2] = {&m0, &m1};
  std::vector<std::string> names;
  for (int k = 0; k < 2; ++k) {
    for (const auto& e : parts[k]->universe()) names.push_back(component_element(e, k));
  }
  Structure out(names);
  const auto n0 = static_cast<Element>(m0.size());
  const auto offset = [&](int k) { return k == 0 ? Element{0} : n0; };
  // Cross distances stay 1 from the discrete default.
  for (int k = 0; k < 2; ++k) {
    const Structure& m = *parts[k];
    for (Element a = 0; a < m.size(); ++a) {
      for (Element b = 0; b < m.size(); ++b) out.set_distance(a + offset(k), b + offset(k), m.distance(a, b));
    }
  }
  auto component_of = [&](Element e) { return e < n0 ? 0 : 1; };
  auto local = [&](const Tuple& t, int& k) -> std::optional<Tuple> {
    Tuple src(t.size());
    k = -1;
    for (std::size_t i = 0; i < t.size(); ++i) {
      int c = component_of(t[i]);
      if (k >= 0 && c != k) return std::nullopt;
      k = c;
      src[i] = t[i] - offset(c);
    }
    return src;
  };
  for (int k = 0; k < 2; ++k) {
    const Structure& m = *parts[k];
    for (const auto& [name, table] : m.predicates()) {
      const std::string target = component_symbol(name, k);
      out.add_predicate(target, table.arity);
      for_each_tuple(out.size(), table.arity, [&](const Tuple& t) {
        int c = k;
        auto src = local(t, c);
        if (!src || (c >= 0 && c != k)) return;
        out.set_predicate(target, t, m.predicate(name, *src));
      });
    }
    for (const auto& [name, table] : m.operations()) {
      const std::string target = component_symbol(name, k);
      out.add_operation(target, table.arity, 0);
      for_each_tuple(out.size(), table.arity, [&](const Tuple& t) {
        int c = k;
        auto src = local(t, c);
        if (!src || (c >= 0 && c != k)) return;
        out.set_operation(target, t, m.operation(name, *src) + offset(k));
      });
    }
  }
  for (int k = 0; k < 2; ++k) {
    const std::string p = membership_predicate(k);
    out.add_predicate(p, 1);
    for (Element e = 0; e < out.size(); ++e) {
      if (component_of(e) == k) out.set_predicate(p, std::vector<Element>{e}, Rational(1));
    }
  }
  return out;
}

Signature combine_signature(const Signature& s) {
  Signature out;
  for (int k = 0; k < 2; ++k) {
    for (const auto& [name, arity] : s.vocabulary.predicates()) {
      out.vocabulary.add_predicate(component_symbol(name, k), arity);
    }
    for (const auto& [name, arity] : s.vocabulary.operations()) {
      out.vocabulary.add_operation(component_symbol(name, k), arity);
    }
    for (const auto& [name, samples] : s.moduli) out.moduli[component_symbol(name, k)] = samples;
  }
  for (int k = 0; k < 2; ++k) {
    out.vocabulary.add_predicate(membership_predicate(k), 1);
    out.moduli[membership_predicate(k)] = {};
  }
  return out;
}

std::vector<Rational> similarity_view(const Structure& m) {
  std::vector<Rational> out;
  out.reserve(m.metric().size());
  for (const Rational& d : m.metric()) out.push_back(Rational(1) - d);
  return out;
}

std::vector<Rational> metric_from_similarity(std::span<const Rational> similarity) {
  std::vector<Rational> out;
  out.reserve(similarity.size());
  for (const Rational& s : similarity) out.push_back(Rational(1) - s);
  return out;
}

} // namespace pavelka
