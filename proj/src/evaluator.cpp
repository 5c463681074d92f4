#include "pavelka/evaluator.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "pavelka/error.hpp"

namespace pavelka {

namespace {

struct CTerm {
  int slot = -1; // variable slot, or -1 for an application
  const OperationTable* op = nullptr;
  std::vector<CTerm> args;
};

enum class Op { Metric, Predicate, Implies, Constant, Exists };

struct CNode {
  Op op;
  const PredicateTable* pred = nullptr;
  std::vector<CTerm> terms;
  int lhs = -1, rhs = -1; // Implies children, or body in lhs for Exists
  int slot = -1;          // bound slot of Exists
  Rational value;
  // Memoization over the node's free slots; empty when disabled.
  bool memo = false;
  std::vector<int> memo_slots;
  std::unordered_map<std::uint64_t, Rational> table;
};

struct CompileKey {
  const FormulaNode* node;
  std::vector<int> slots;
  int depth;
  bool operator<(const CompileKey& o) const {
    if (node != o.node) return std::less<const FormulaNode*>()(node, o.node);
    if (depth != o.depth) return depth < o.depth;
    return slots < o.slots;
  }
};

bool has_quantifier(const Formula& f) {
  switch (f.kind()) {
  case FormulaKind::Exists: return true;
  case FormulaKind::Implies: return has_quantifier(f.lhs()) || has_quantifier(f.rhs());
  default: return false;
  }
}

} // namespace

struct Evaluator::Impl {
  const Structure& m;
  std::vector<CNode> nodes;
  std::map<CompileKey, int> compiled;
  // Keyed by node address, so the source formula is kept alive next to its
  // expansion; otherwise a freed node's address could be reused by another.
  std::unordered_map<const FormulaNode*, std::pair<Formula, Formula>> expanded;
  std::unordered_map<const FormulaNode*, std::vector<std::string>> free_vars;
  std::unordered_map<const FormulaNode*, bool> quantified;
  std::vector<Element> env;

  explicit Impl(const Structure& s) : m(s) {}

  const Formula& core_of(const Formula& f) {
    auto it = expanded.find(f.node());
    if (it != expanded.end()) return it->second.second;
    return expanded.emplace(f.node(), std::pair{f, expand_abbreviations(f)}).first->second.second;
  }

  const std::vector<std::string>& frees(const Formula& f) {
    auto it = free_vars.find(f.node());
    if (it != free_vars.end()) return it->second;
    return free_vars.emplace(f.node(), free_variables(f)).first->second;
  }

  bool quantifies(const Formula& f) {
    auto it = quantified.find(f.node());
    if (it != quantified.end()) return it->second;
    return quantified.emplace(f.node(), has_quantifier(f)).first->second;
  }

  CTerm compile_term(const Term& t, const std::map<std::string, int>& scope) {
    CTerm out;
    if (t.is_variable()) {
      auto it = scope.find(t.name());
      if (it == scope.end()) throw Error(ErrorKind::UnassignedVariable, "variable '" + t.name() + "' is unassigned");
      out.slot = it->second;
      return out;
    }
    auto op = m.operations().find(t.name());
    if (op == m.operations().end()) {
      throw Error(ErrorKind::UnknownSymbol, "structure has no operation '" + t.name() + "'");
    }
    if (op->second.arity != static_cast<int>(t.args().size())) {
      throw Error(ErrorKind::ArityMismatch, "operation '" + t.name() + "' has arity " +
                                                std::to_string(op->second.arity));
    }
    out.op = &op->second;
    for (const Term& a : t.args()) out.args.push_back(compile_term(a, scope));
    return out;
  }

  int compile(const Formula& f, const std::map<std::string, int>& scope, int depth) {
    CompileKey key{f.node(), {}, depth};
    for (const auto& v : frees(f)) {
      auto it = scope.find(v);
      if (it == scope.end()) throw Error(ErrorKind::UnassignedVariable, "variable '" + v + "' is unassigned");
      key.slots.push_back(it->second);
    }
    if (auto it = compiled.find(key); it != compiled.end()) return it->second;

    CNode node;
    switch (f.kind()) {
    case FormulaKind::Metric:
      node.op = Op::Metric;
      for (const Term& t : f.terms()) node.terms.push_back(compile_term(t, scope));
      break;
    case FormulaKind::Predicate: {
      node.op = Op::Predicate;
      auto p = m.predicates().find(f.symbol());
      if (p == m.predicates().end()) {
        throw Error(ErrorKind::UnknownSymbol, "structure has no predicate '" + f.symbol() + "'");
      }
      if (p->second.arity != static_cast<int>(f.terms().size())) {
        throw Error(ErrorKind::ArityMismatch, "predicate '" + f.symbol() + "' has arity " +
                                                  std::to_string(p->second.arity));
      }
      node.pred = &p->second;
      for (const Term& t : f.terms()) node.terms.push_back(compile_term(t, scope));
      break;
    }
    case FormulaKind::Constant:
      node.op = Op::Constant;
      node.value = f.value();
      break;
    case FormulaKind::Implies:
      node.op = Op::Implies;
      node.lhs = compile(f.lhs(), scope, depth);
      node.rhs = compile(f.rhs(), scope, depth);
      break;
    case FormulaKind::Exists: {
      node.op = Op::Exists;
      node.slot = depth;
      auto inner = scope;
      inner[f.variable()] = depth;
      node.lhs = compile(f.body(), inner, depth + 1);
      break;
    }
    default: throw Error(ErrorKind::InvalidArgument, "evaluator expects a core formula");
    }
    if ((f.kind() == FormulaKind::Implies || f.kind() == FormulaKind::Exists) && quantifies(f)) {
      // Key is a base-n number over the free slots; skip when it cannot fit.
      long double capacity = 1;
      for (std::size_t i = 0; i < key.slots.size(); ++i) capacity *= static_cast<long double>(m.size());
      if (capacity < static_cast<long double>(std::numeric_limits<std::uint64_t>::max() / 2)) {
        node.memo = true;
        node.memo_slots = key.slots;
      }
    }
    nodes.push_back(std::move(node));
    int id = static_cast<int>(nodes.size()) - 1;
    compiled.emplace(std::move(key), id);
    return id;
  }

  Element run_term(const CTerm& t) {
    if (t.slot >= 0) return env[static_cast<std::size_t>(t.slot)];
    std::size_t index = 0;
    for (const CTerm& a : t.args) index = index * m.size() + run_term(a);
    return t.op->values[index];
  }

  Rational run(int id) {
    CNode& n = nodes[static_cast<std::size_t>(id)];
    switch (n.op) {
    case Op::Metric: return m.distance(run_term(n.terms[0]), run_term(n.terms[1]));
    case Op::Predicate: {
      std::size_t index = 0;
      for (const CTerm& t : n.terms) index = index * m.size() + run_term(t);
      return n.pred->values[index];
    }
    case Op::Constant: return n.value;
    default: break;
    }
    std::uint64_t key = 0;
    if (n.memo) {
      for (int s : n.memo_slots) key = key * m.size() + env[static_cast<std::size_t>(s)];
      auto it = n.table.find(key);
      if (it != n.table.end()) return it->second;
    }
    Rational result;
    if (n.op == Op::Implies) {
      Rational a = run(n.lhs);
      Rational b = run(n.rhs);
      result = lukasiewicz_implies(a, b);
    } else {
      const auto slot = static_cast<std::size_t>(n.slot);
      const Element saved = env[slot];
      const Rational one(1);
      result = Rational(0);
      bool first = true;
      for (Element e = 0; e < m.size(); ++e) {
        env[slot] = e;
        Rational v = run(n.lhs);
        if (first || v > result) result = v;
        first = false;
        if (result == one) break;
      }
      env[slot] = saved;
    }
    if (n.memo) n.table.emplace(key, result);
    return result;
  }

  std::size_t slot_count() const {
    int most = 0;
    for (const auto& n : nodes) most = std::max(most, n.slot + 1);
    return static_cast<std::size_t>(most);
  }

  Rational evaluate(const Formula& formula, std::span<const std::string> vars, std::span<const Element> values) {
    const Formula& core = core_of(formula);
    const auto& fv = frees(core);
    std::map<std::string, int> scope;
    std::vector<Element> initial;
    for (std::size_t i = 0; i < fv.size(); ++i) {
      auto it = std::find(vars.begin(), vars.end(), fv[i]);
      if (it == vars.end()) throw Error(ErrorKind::UnassignedVariable, "free variable '" + fv[i] + "' is unassigned");
      Element e = values[static_cast<std::size_t>(it - vars.begin())];
      if (e >= m.size()) throw Error(ErrorKind::InvalidArgument, "assigned element out of range");
      scope[fv[i]] = static_cast<int>(i);
      initial.push_back(e);
    }
    int root = compile(core, scope, static_cast<int>(fv.size()));
    env.assign(std::max(slot_count(), initial.size()), 0);
    std::copy(initial.begin(), initial.end(), env.begin());
    return run(root);
  }
};

Evaluator::Evaluator(const Structure& m) : m_(m), impl_(std::make_unique<Impl>(m)) {}
Evaluator::~Evaluator() = default;

Rational Evaluator::eval(const Formula& formula, const Assignment& assignment) {
  std::vector<std::string> vars;
  std::vector<Element> values;
  for (const auto& [v, e] : assignment) {
    vars.push_back(v);
    values.push_back(e);
  }
  return impl_->evaluate(formula, vars, values);
}

Rational Evaluator::eval(const Formula& formula, std::span<const std::string> vars, std::span<const Element> values) {
  if (vars.size() != values.size()) throw Error(ErrorKind::InvalidArgument, "variable and value counts differ");
  return impl_->evaluate(formula, vars, values);
}

Rational eval(const Structure& m, const Formula& formula, const Assignment& assignment) {
  Evaluator ev(m);
  return ev.eval(formula, assignment);
}

bool satisfies(const Structure& m, const Formula& sentence) {
  if (!is_sentence(sentence)) throw Error(ErrorKind::NotSentence, "satisfies expects a sentence: " + render(sentence));
  return eval(m, sentence) == Rational(1);
}

TheoryReport check_theory(Evaluator& evaluator, const Theory& theory) {
  TheoryReport report;
  for (std::size_t i = 0; i < theory.sentences.size(); ++i) {
    const Formula& s = theory.sentences[i];
    if (!is_sentence(s)) throw Error(ErrorKind::NotSentence, "theory member is not a sentence: " + render(s));
    Rational v = evaluator.eval(s);
    if (v != Rational(1)) {
      report.satisfied = false;
      report.failing.push_back({i, s, v});
    }
  }
  return report;
}

TheoryReport check_theory(const Structure& m, const Theory& theory) {
  Evaluator ev(m);
  return check_theory(ev, theory);
}

EntailmentResult entails(std::span<const Structure> family, const Theory& theory, const TypeSet& gamma,
                         const TypeSet& sigma) {
  if (gamma.variables != sigma.variables) {
    throw Error(ErrorKind::InvalidArgument, "entails: type sets use different variable tuples");
  }
  gamma.check();
  sigma.check();
  const int n = static_cast<int>(gamma.variables.size());
  const Rational one(1);
  for (std::size_t k = 0; k < family.size(); ++k) {
    Evaluator ev(family[k]);
    if (!check_theory(ev, theory).satisfied) continue;
    std::optional<Counterexample> found;
    for_each_tuple(family[k].size(), n, [&](const Tuple& t) {
      if (found) return;
      for (const Formula& g : gamma.formulas) {
        if (ev.eval(g, gamma.variables, t) != one) return;
      }
      for (std::size_t j = 0; j < sigma.formulas.size(); ++j) {
        Rational v = ev.eval(sigma.formulas[j], sigma.variables, t);
        if (v != one) {
          found = Counterexample{k, t, j, sigma.formulas[j], v};
          return;
        }
      }
    });
    if (found) return {false, found};
  }
  return {true, std::nullopt};
}

Vocabulary named_vocabulary(const Structure& m, std::span<const Element> subset) {
  Vocabulary v = m.vocabulary();
  for (Element a : subset) {
    const std::string& name = m.name(a);
    if (!is_identifier(name) || is_reserved(name)) {
      throw Error(ErrorKind::InvalidArgument, "element name '" + name + "' cannot serve as a constant symbol");
    }
    if (v.contains(name)) {
      if (v.operation_arity(name) == 0 && m.constant(name) == a) continue;
      throw Error(ErrorKind::NameClash, "element name '" + name + "' clashes with a vocabulary symbol");
    }
    v.add_constant(name);
  }
  return v;
}

Structure name_elements(const Structure& m, std::span<const Element> subset) {
  Vocabulary v = named_vocabulary(m, subset);
  Structure out = m;
  for (Element a : subset) {
    if (!out.operations().count(m.name(a))) out.add_constant(m.name(a), a);
  }
  return out;
}

TarskiVaughtReport tarski_vaught_check(const Structure& m, std::span<const Element> subset,
                                       std::span<const Formula> formulas, std::span<const Rational> grid) {
  for (Element a : subset) {
    if (a >= m.size()) throw Error(ErrorKind::InvalidArgument, "subset element out of range");
  }
  for (const Rational& r : grid) {
    if (r.sign() <= 0 || r >= Rational(1)) throw Error(ErrorKind::InvalidArgument, "grid values must lie in (0,1)");
  }
  Structure named = name_elements(m, subset);
  Evaluator ev(named);
  TarskiVaughtReport report;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    const Formula& phi = formulas[i];
    auto fv = free_variables(phi);
    if (fv.size() != 1) {
      throw Error(ErrorKind::InvalidArgument, "Tarski-Vaught formula must have exactly one free variable: " + render(phi));
    }
    Rational sup = ev.eval(Formula::exists(fv[0], phi));
    if (sup != Rational(1)) continue;
    Rational best(0);
    for (Element a : subset) best = max(best, ev.eval(phi, fv, std::vector<Element>{a}));
    for (const Rational& r : grid) {
      if (best < r) report.failures.push_back({i, r, best});
    }
  }
  return report;
}

} // namespace pavelka
