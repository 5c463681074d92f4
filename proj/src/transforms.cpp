#include "pavelka/transforms.hpp"

#include <unordered_map>

namespace pavelka {

Formula discrete_macro(const Formula& atom) {
  if (atom.kind() != FormulaKind::Predicate && atom.kind() != FormulaKind::Metric) {
    throw Error(ErrorKind::InvalidArgument, "Discrete expects an atomic formula, got: " + render(atom));
  }
  return expand_abbreviations(Formula::disjunction(atom, Formula::negation(atom)));
}

namespace {

// Shared recursion for both relativizations; `guard(v)` is the membership
// atom for the bound variable v.
class Relativizer {
public:
  explicit Relativizer(std::function<Formula(const std::string&)> guard) : guard_(std::move(guard)) {}

  Formula run(const Formula& f) {
    if (auto it = memo_.find(f.node()); it != memo_.end()) return it->second;
    Formula out = step(f);
    memo_.emplace(f.node(), out);
    return out;
  }

private:
  Formula step(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::Metric:
    case FormulaKind::Predicate:
    case FormulaKind::Constant: return f;
    case FormulaKind::Implies: return Formula::implies(run(f.lhs()), run(f.rhs()));
    case FormulaKind::Or: return Formula::disjunction(run(f.lhs()), run(f.rhs()));
    case FormulaKind::And: return Formula::conjunction(run(f.lhs()), run(f.rhs()));
    case FormulaKind::Not: return Formula::negation(run(f.operand()));
    case FormulaKind::AtMost: return Formula::at_most(run(f.operand()), f.value());
    case FormulaKind::AtLeast: return Formula::at_least(run(f.operand()), f.value());
    case FormulaKind::Exists:
      return Formula::exists(f.variable(), Formula::conjunction(guard_(f.variable()), run(f.body())));
    case FormulaKind::Forall:
      return Formula::forall(f.variable(),
                             Formula::disjunction(Formula::negation(guard_(f.variable())), run(f.body())));
    }
    return f;
  }

  std::function<Formula(const std::string&)> guard_;
  std::unordered_map<const FormulaNode*, Formula> memo_;
};

} // namespace

Formula relativize_monadic(const Formula& phi, const std::string& predicate) {
  if (symbols_of(phi).count(predicate)) {
    throw Error(ErrorKind::NameClash, "relativizing predicate '" + predicate + "' occurs in the formula");
  }
  if (all_variables(phi).count(predicate)) {
    throw Error(ErrorKind::NameClash, "relativizing predicate '" + predicate + "' is used as a variable");
  }
  Relativizer r([&](const std::string& v) { return Formula::predicate(predicate, {Term::variable(v)}); });
  return r.run(phi);
}

FamilyRelativization relativize_family(const Formula& sentence, const std::string& relation) {
  if (!is_sentence(sentence)) {
    throw Error(ErrorKind::NotSentence, "family relativization expects a sentence: " + render(sentence));
  }
  if (symbols_of(sentence).count(relation)) {
    throw Error(ErrorKind::NameClash, "relativizing relation '" + relation + "' occurs in the formula");
  }
  auto taken = all_variables(sentence);
  for (const auto& s : symbols_of(sentence)) taken.insert(s);
  taken.insert(relation);
  const std::string x = fresh_variable("x", taken);
  Relativizer r([&](const std::string& v) { return Formula::predicate(relation, {Term::variable(x), Term::variable(v)}); });
  return {r.run(sentence), x};
}

namespace {

Restriction restrict_to(const Structure& m, const std::string& symbol, const std::vector<Rational>& row,
                        const std::string& what) {
  Restriction out;
  std::vector<Element> keep;
  for (Element e = 0; e < row.size(); ++e) {
    const Rational& v = row[e];
    if (v == Rational(1)) {
      keep.push_back(e);
    } else if (v.sign() != 0) {
      out.failure = ErrorKind::NonDiscrete;
      out.reason = what + " is not discrete: value " + v.str() + " at " + m.name(e);
      return out;
    }
  }
  if (keep.empty()) {
    out.failure = ErrorKind::EmptyRestriction;
    out.reason = what + " is empty";
    return out;
  }
  try {
    Structure reduced = m;
    reduced.remove_symbol(symbol);
    out.structure = induced_substructure(reduced, keep);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::OperationEscapes) throw;
    out.failure = ErrorKind::OperationEscapes;
    out.reason = e.what();
  }
  return out;
}

} // namespace

Restriction try_restrict_to_predicate(const Structure& m, const std::string& predicate) {
  const PredicateTable& table = m.predicate_table(predicate);
  if (table.arity != 1) throw Error(ErrorKind::ArityMismatch, "restriction predicate '" + predicate + "' is not monadic");
  return restrict_to(m, predicate, table.values, "predicate " + predicate);
}

Structure restrict_to_predicate(const Structure& m, const std::string& predicate) {
  Restriction r = try_restrict_to_predicate(m, predicate);
  if (!r.defined()) throw Error(r.failure, r.reason);
  return *r.structure;
}

Restriction try_restrict_to_family(const Structure& m, const std::string& relation, Element a) {
  const PredicateTable& table = m.predicate_table(relation);
  if (table.arity != 2) throw Error(ErrorKind::ArityMismatch, "family relation '" + relation + "' is not binary");
  if (a >= m.size()) throw Error(ErrorKind::InvalidArgument, "element index out of range");
  std::vector<Rational> row;
  for (Element b = 0; b < m.size(); ++b) row.push_back(m.predicate(relation, std::vector<Element>{a, b}));
  return restrict_to(m, relation, row, relation + "(" + m.name(a) + ",-)");
}

Vocabulary order_vocabulary(const OrderTheorySpec& spec, const Vocabulary& base) {
  if (spec.predicate == spec.relation) {
    throw Error(ErrorKind::NameClash, "order predicate and relation must differ");
  }
  for (const auto& name : {spec.predicate, spec.relation}) {
    if (base.contains(name)) throw Error(ErrorKind::NameClash, "symbol '" + name + "' already in the vocabulary");
    if (name == "x" || name == "y" || name == "z") {
      throw Error(ErrorKind::NameClash, "symbol '" + name + "' clashes with a bound variable of the theory");
    }
  }
  Vocabulary v = base;
  v.add_predicate(spec.predicate, 1);
  v.add_predicate(spec.relation, 2);
  return v;
}

Theory order_theory(const OrderTheorySpec& spec, const Vocabulary& base) {
  order_vocabulary(spec, base);
  const Term x = Term::variable("x"), y = Term::variable("y"), z = Term::variable("z");
  auto P = [&](const Term& t) { return Formula::predicate(spec.predicate, {t}); };
  auto lt = [&](const Term& a, const Term& b) { return Formula::predicate(spec.relation, {a, b}); };
  auto discrete = [](const Formula& f) { return Formula::disjunction(f, Formula::negation(f)); };
  auto Not = [](const Formula& f) { return Formula::negation(f); };
  auto Or = [](const Formula& a, const Formula& b) { return Formula::disjunction(a, b); };
  auto And = [](const Formula& a, const Formula& b) { return Formula::conjunction(a, b); };
  auto all = [](const char* v, const Formula& f) { return Formula::forall(v, f); };

  std::vector<Formula> raw{
      all("x", discrete(P(x))),
      all("x", all("y", Or(Or(Not(P(x)), Not(P(y))), discrete(lt(x, y))))),
      all("x", all("y", Or(Or(Not(P(x)), Not(P(y))), discrete(Formula::metric(x, y))))),
      all("x", Or(Not(P(x)), Not(lt(x, x)))),
      all("x", all("y", Or(Not(And(And(P(x), P(y)), lt(x, y))), Not(lt(y, x))))),
      all("x", all("y", all("z", Or(Not(And(And(And(P(x), P(y)), lt(x, y)), lt(y, z))), lt(x, z))))),
      all("x", all("y", Or(Not(And(P(x), P(y))), Or(Or(lt(x, y), lt(y, x)), Not(Formula::metric(x, y)))))),
  };
  Theory theory;
  theory.name = "theta";
  for (const auto& f : raw) theory.sentences.push_back(expand_abbreviations(f));
  return theory;
}

TypeSet thicken(const TypeSet& sigma, const Rational& delta, std::optional<std::size_t> bound) {
  sigma.check();
  if (!delta.in_unit_interval()) throw Error(ErrorKind::ConstantRange, "thickening radius " + delta.str() + " outside [0,1]");
  const std::size_t m = sigma.formulas.size();
  const std::size_t limit = bound ? std::min(*bound, m) : m;
  if (m > 20) throw Error(ErrorKind::InvalidArgument, "thicken supports at most 20 formulas");

  std::set<std::string> taken(sigma.variables.begin(), sigma.variables.end());
  for (const auto& f : sigma.formulas) {
    for (const auto& v : all_variables(f)) taken.insert(v);
    for (const auto& s : symbols_of(f)) taken.insert(s);
  }
  std::vector<std::string> ys;
  std::map<std::string, Term> to_y;
  for (const auto& x : sigma.variables) {
    std::string y = fresh_variable("y", taken);
    taken.insert(y);
    ys.push_back(y);
    to_y.emplace(x, Term::variable(y));
  }
  std::vector<Formula> shifted;
  for (const auto& f : sigma.formulas) shifted.push_back(substitute(f, to_y));

  auto build = [&](const std::vector<std::size_t>& members) {
    std::vector<Formula> parts;
    for (std::size_t k = 0; k < ys.size(); ++k) {
      parts.push_back(Formula::at_most(
          Formula::metric(Term::variable(sigma.variables[k]), Term::variable(ys[k])), delta));
    }
    std::vector<Formula> chosen;
    for (std::size_t i : members) chosen.push_back(shifted[i]);
    parts.push_back(conjunction_of(chosen));
    Formula body = conjunction_of(parts);
    for (std::size_t k = ys.size(); k-- > 0;) body = Formula::exists(ys[k], body);
    return body;
  };

  TypeSet out;
  out.name = sigma.name + "^" + delta.str();
  out.variables = sigma.variables;
  if (m == 0) {
    out.formulas.push_back(build({}));
    return out;
  }
  // Subsets by size, then lexicographically by member index.
  for (std::size_t size = 1; size <= m; ++size) {
    if (size > limit && size != m) continue;
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      out.formulas.push_back(build(pick));
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == m - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

} // namespace pavelka
