#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "pavelka/error.hpp"
#include "pavelka/syntax.hpp"

namespace pavelka {

struct FormulaNode {
  FormulaKind kind;
  std::string name; // predicate symbol or bound variable
  Rational value;   // constant or comparison bound
  std::vector<Term> terms;
  std::vector<Formula> children;
};

Term Term::variable(std::string name) {
  Term t;
  t.kind_ = Kind::Variable;
  t.name_ = std::move(name);
  return t;
}

Term Term::apply(std::string function, std::vector<Term> args) {
  Term t;
  t.kind_ = Kind::Apply;
  t.name_ = std::move(function);
  t.args_ = std::move(args);
  return t;
}

namespace {

std::shared_ptr<const FormulaNode> make_node(FormulaKind kind, std::string name, Rational value,
                                             std::vector<Term> terms, std::vector<Formula> children) {
  return std::make_shared<const FormulaNode>(
      FormulaNode{kind, std::move(name), std::move(value), std::move(terms), std::move(children)});
}

void check_unit(const Rational& r, const char* what) {
  if (!r.in_unit_interval()) {
    throw Error(ErrorKind::ConstantRange, std::string(what) + " " + r.str() + " lies outside [0,1]");
  }
}

} // namespace

Formula Formula::metric(Term lhs, Term rhs) {
  return Formula(make_node(FormulaKind::Metric, "d", 0, {std::move(lhs), std::move(rhs)}, {}));
}
Formula Formula::predicate(std::string symbol, std::vector<Term> args) {
  return Formula(make_node(FormulaKind::Predicate, std::move(symbol), 0, std::move(args), {}));
}
Formula Formula::implies(Formula lhs, Formula rhs) {
  return Formula(make_node(FormulaKind::Implies, {}, 0, {}, {std::move(lhs), std::move(rhs)}));
}
Formula Formula::constant(Rational value) {
  check_unit(value, "constant");
  return Formula(make_node(FormulaKind::Constant, {}, std::move(value), {}, {}));
}
Formula Formula::exists(std::string variable, Formula body) {
  return Formula(make_node(FormulaKind::Exists, std::move(variable), 0, {}, {std::move(body)}));
}
Formula Formula::negation(Formula operand) {
  return Formula(make_node(FormulaKind::Not, {}, 0, {}, {std::move(operand)}));
}
Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return Formula(make_node(FormulaKind::Or, {}, 0, {}, {std::move(lhs), std::move(rhs)}));
}
Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return Formula(make_node(FormulaKind::And, {}, 0, {}, {std::move(lhs), std::move(rhs)}));
}
Formula Formula::at_most(Formula operand, Rational bound) {
  check_unit(bound, "comparison bound");
  return Formula(make_node(FormulaKind::AtMost, {}, std::move(bound), {}, {std::move(operand)}));
}
Formula Formula::at_least(Formula operand, Rational bound) {
  check_unit(bound, "comparison bound");
  return Formula(make_node(FormulaKind::AtLeast, {}, std::move(bound), {}, {std::move(operand)}));
}
Formula Formula::forall(std::string variable, Formula body) {
  return Formula(make_node(FormulaKind::Forall, std::move(variable), 0, {}, {std::move(body)}));
}

FormulaKind Formula::kind() const { return node_->kind; }

bool Formula::is_core_kind() const {
  switch (node_->kind) {
  case FormulaKind::Metric:
  case FormulaKind::Predicate:
  case FormulaKind::Implies:
  case FormulaKind::Constant:
  case FormulaKind::Exists: return true;
  default: return false;
  }
}

bool Formula::is_atomic() const {
  return node_->kind == FormulaKind::Metric || node_->kind == FormulaKind::Predicate;
}

const Formula& Formula::lhs() const { return node_->children.at(0); }
const Formula& Formula::rhs() const { return node_->children.at(1); }
const Formula& Formula::operand() const { return node_->children.at(0); }
const Formula& Formula::body() const { return node_->children.at(0); }
const std::string& Formula::variable() const { return node_->name; }
const Rational& Formula::value() const { return node_->value; }
const std::string& Formula::symbol() const { return node_->name; }
const std::vector<Term>& Formula::terms() const { return node_->terms; }

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<const void*, const void*>& p) const {
    return std::hash<const void*>()(p.first) * 31 + std::hash<const void*>()(p.second);
  }
};

bool equal_nodes(const FormulaNode* a, const FormulaNode* b,
                 std::unordered_set<std::pair<const void*, const void*>, PairHash>& known) {
  if (a == b) return true;
  if (known.count({a, b})) return true;
  if (a->kind != b->kind || a->name != b->name || a->value != b->value || a->terms != b->terms ||
      a->children.size() != b->children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!equal_nodes(a->children[i].node(), b->children[i].node(), known)) return false;
  }
  known.insert({a, b});
  return true;
}

} // namespace

bool operator==(const Formula& a, const Formula& b) {
  std::unordered_set<std::pair<const void*, const void*>, PairHash> known;
  return equal_nodes(a.node(), b.node(), known);
}

Formula conjunction_of(std::span<const Formula> parts) {
  if (parts.empty()) return Formula::constant(1);
  Formula out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = Formula::conjunction(out, parts[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Variable and symbol queries

namespace {

void term_variables(const Term& t, std::vector<std::string>& out) {
  if (t.is_variable()) {
    if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
    return;
  }
  for (const auto& a : t.args()) term_variables(a, out);
}

using FreeCache = std::unordered_map<const FormulaNode*, std::vector<std::string>>;

const std::vector<std::string>& free_of(const Formula& f, FreeCache& cache) {
  if (auto it = cache.find(f.node()); it != cache.end()) return it->second;
  std::vector<std::string> out;
  if (f.is_atomic()) {
    for (const auto& t : f.terms()) term_variables(t, out);
  } else if (f.kind() == FormulaKind::Constant) {
  } else if (f.kind() == FormulaKind::Exists || f.kind() == FormulaKind::Forall) {
    for (const auto& v : free_of(f.body(), cache)) {
      if (v != f.variable()) out.push_back(v);
    }
  } else {
    out = free_of(f.lhs(), cache);
    if (f.kind() == FormulaKind::Implies || f.kind() == FormulaKind::Or || f.kind() == FormulaKind::And) {
      for (const auto& v : free_of(f.rhs(), cache)) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
      }
    }
  }
  return cache.emplace(f.node(), std::move(out)).first->second;
}

template <typename Visit>
void visit_nodes(const Formula& f, std::unordered_set<const FormulaNode*>& seen, Visit&& visit) {
  if (!seen.insert(f.node()).second) return;
  visit(f);
  if (f.is_atomic() || f.kind() == FormulaKind::Constant) return;
  visit_nodes(f.lhs(), seen, visit);
  if (f.kind() == FormulaKind::Implies || f.kind() == FormulaKind::Or || f.kind() == FormulaKind::And) {
    visit_nodes(f.rhs(), seen, visit);
  }
}

void term_symbols(const Term& t, std::set<std::string>& out) {
  if (t.is_variable()) return;
  out.insert(t.name());
  for (const auto& a : t.args()) term_symbols(a, out);
}

bool is_binary(FormulaKind k) { return k == FormulaKind::Implies || k == FormulaKind::Or || k == FormulaKind::And; }

} // namespace

std::vector<std::string> free_variables(const Formula& formula) {
  FreeCache cache;
  return free_of(formula, cache);
}

std::vector<std::string> free_variables(const Term& term) {
  std::vector<std::string> out;
  term_variables(term, out);
  return out;
}

bool is_sentence(const Formula& formula) { return free_variables(formula).empty(); }

std::set<std::string> all_variables(const Formula& formula) {
  std::set<std::string> out;
  std::unordered_set<const FormulaNode*> seen;
  visit_nodes(formula, seen, [&](const Formula& f) {
    if (f.kind() == FormulaKind::Exists || f.kind() == FormulaKind::Forall) out.insert(f.variable());
    if (f.is_atomic()) {
      for (const auto& t : f.terms()) {
        for (auto& v : free_variables(t)) out.insert(v);
      }
    }
  });
  return out;
}

std::set<std::string> symbols_of(const Formula& formula) {
  std::set<std::string> out;
  std::unordered_set<const FormulaNode*> seen;
  visit_nodes(formula, seen, [&](const Formula& f) {
    if (f.kind() == FormulaKind::Predicate) out.insert(f.symbol());
    if (f.is_atomic()) {
      for (const auto& t : f.terms()) term_symbols(t, out);
    }
  });
  return out;
}

bool is_core(const Formula& formula) {
  bool core = true;
  std::unordered_set<const FormulaNode*> seen;
  visit_nodes(formula, seen, [&](const Formula& f) { core = core && f.is_core_kind(); });
  return core;
}

std::string fresh_variable(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.count(base) && !is_reserved(base)) return base;
  for (int i = 1;; ++i) {
    std::string candidate = base + std::to_string(i);
    if (!taken.count(candidate)) return candidate;
  }
}

// ---------------------------------------------------------------------------
// Checks

namespace {

void check_term(const Term& t, const Vocabulary& vocabulary) {
  if (t.is_variable()) {
    if (!is_identifier(t.name()) || is_reserved(t.name())) {
      throw Error(ErrorKind::InvalidArgument, "invalid variable name '" + t.name() + "'");
    }
    if (vocabulary.contains(t.name())) {
      throw Error(ErrorKind::NameClash, "variable '" + t.name() + "' clashes with a vocabulary symbol");
    }
    return;
  }
  auto arity = vocabulary.operation_arity(t.name());
  if (!arity) {
    if (vocabulary.predicate_arity(t.name())) {
      throw Error(ErrorKind::UnknownSymbol, "'" + t.name() + "' is a predicate, not an operation");
    }
    throw Error(ErrorKind::UnknownSymbol, "unknown operation '" + t.name() + "'");
  }
  if (*arity != static_cast<int>(t.args().size())) {
    throw Error(ErrorKind::ArityMismatch, "operation '" + t.name() + "' has arity " + std::to_string(*arity) +
                                              " but is applied to " + std::to_string(t.args().size()) +
                                              " arguments");
  }
  for (const auto& a : t.args()) check_term(a, vocabulary);
}

} // namespace

void check_formula(const Formula& formula, const Vocabulary& vocabulary) {
  std::unordered_set<const FormulaNode*> seen;
  visit_nodes(formula, seen, [&](const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::Predicate: {
      auto arity = vocabulary.predicate_arity(f.symbol());
      if (!arity) throw Error(ErrorKind::UnknownSymbol, "unknown predicate '" + f.symbol() + "'");
      if (*arity != static_cast<int>(f.terms().size())) {
        throw Error(ErrorKind::ArityMismatch, "predicate '" + f.symbol() + "' has arity " +
                                                  std::to_string(*arity) + " but is applied to " +
                                                  std::to_string(f.terms().size()) + " arguments");
      }
      for (const auto& t : f.terms()) check_term(t, vocabulary);
      break;
    }
    case FormulaKind::Metric:
      for (const auto& t : f.terms()) check_term(t, vocabulary);
      break;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      check_term(Term::variable(f.variable()), vocabulary);
      break;
    default: break;
    }
  });
}

void TypeSet::check() const {
  if (variables.empty()) throw Error(ErrorKind::InvalidArgument, "type '" + name + "' has no variables");
  std::set<std::string> declared;
  for (const auto& v : variables) {
    if (!is_identifier(v) || is_reserved(v)) {
      throw Error(ErrorKind::InvalidArgument, "invalid type variable '" + v + "'");
    }
    if (!declared.insert(v).second) {
      throw Error(ErrorKind::InvalidArgument, "type variable '" + v + "' listed twice");
    }
  }
  for (const auto& f : formulas) {
    for (const auto& v : free_variables(f)) {
      if (!declared.count(v)) {
        throw Error(ErrorKind::InvalidArgument,
                    "formula '" + render(f) + "' of type '" + name + "' has undeclared free variable " + v);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Rewrites

namespace {

struct Expander {
  std::unordered_map<const FormulaNode*, Formula> cache;

  Formula run(const Formula& f) {
    if (auto it = cache.find(f.node()); it != cache.end()) return it->second;
    Formula out = rewrite(f);
    cache.emplace(f.node(), out);
    return out;
  }

  static Formula neg(Formula a) { return Formula::implies(std::move(a), Formula::constant(0)); }
  static Formula lor(const Formula& a, const Formula& b) { return Formula::implies(Formula::implies(a, b), b); }

  Formula rewrite(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::Metric:
    case FormulaKind::Predicate:
    case FormulaKind::Constant: return f;
    case FormulaKind::Implies: {
      Formula a = run(f.lhs()), b = run(f.rhs());
      if (a.node() == f.lhs().node() && b.node() == f.rhs().node()) return f;
      return Formula::implies(a, b);
    }
    case FormulaKind::Exists: {
      Formula body = run(f.body());
      if (body.node() == f.body().node()) return f;
      return Formula::exists(f.variable(), body);
    }
    case FormulaKind::Not: return neg(run(f.operand()));
    case FormulaKind::Or: return lor(run(f.lhs()), run(f.rhs()));
    case FormulaKind::And: return neg(lor(neg(run(f.lhs())), neg(run(f.rhs()))));
    case FormulaKind::AtMost: return Formula::implies(run(f.operand()), Formula::constant(f.value()));
    case FormulaKind::AtLeast: return Formula::implies(Formula::constant(f.value()), run(f.operand()));
    case FormulaKind::Forall: return neg(Formula::exists(f.variable(), neg(run(f.body()))));
    }
    return f;
  }
};

Formula rebuild(const Formula& f, std::vector<Formula> children) {
  switch (f.kind()) {
  case FormulaKind::Implies: return Formula::implies(children[0], children[1]);
  case FormulaKind::Or: return Formula::disjunction(children[0], children[1]);
  case FormulaKind::And: return Formula::conjunction(children[0], children[1]);
  case FormulaKind::Not: return Formula::negation(children[0]);
  case FormulaKind::AtMost: return Formula::at_most(children[0], f.value());
  case FormulaKind::AtLeast: return Formula::at_least(children[0], f.value());
  case FormulaKind::Exists: return Formula::exists(f.variable(), children[0]);
  case FormulaKind::Forall: return Formula::forall(f.variable(), children[0]);
  default: return f;
  }
}

struct Substituter {
  const std::map<std::string, Term>& replacement;
  std::unordered_map<const FormulaNode*, Formula> cache{};

  Formula run(const Formula& f) {
    if (replacement.empty()) return f;
    if (auto it = cache.find(f.node()); it != cache.end()) return it->second;
    Formula out = rewrite(f);
    cache.emplace(f.node(), out);
    return out;
  }

  Formula rewrite(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::Constant: return f;
    case FormulaKind::Metric:
      return Formula::metric(substitute(f.terms()[0], replacement), substitute(f.terms()[1], replacement));
    case FormulaKind::Predicate: {
      std::vector<Term> args;
      for (const auto& t : f.terms()) args.push_back(substitute(t, replacement));
      return Formula::predicate(f.symbol(), std::move(args));
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      const std::string& bound = f.variable();
      auto body_free = free_variables(f.body());
      std::map<std::string, Term> inner;
      std::set<std::string> incoming;
      for (const auto& [var, term] : replacement) {
        if (var == bound) continue;
        if (std::find(body_free.begin(), body_free.end(), var) == body_free.end()) continue;
        inner.emplace(var, term);
        for (auto& v : free_variables(term)) incoming.insert(v);
      }
      Formula body = f.body();
      std::string variable = bound;
      if (incoming.count(bound)) {
        std::set<std::string> taken = all_variables(body);
        taken.insert(incoming.begin(), incoming.end());
        for (const auto& [var, term] : inner) taken.insert(var);
        variable = fresh_variable(bound, taken);
        inner.emplace(bound, Term::variable(variable));
      }
      Substituter nested{inner};
      Formula new_body = nested.run(body);
      return f.kind() == FormulaKind::Exists ? Formula::exists(variable, new_body)
                                             : Formula::forall(variable, new_body);
    }
    default: {
      std::vector<Formula> children{run(f.lhs())};
      if (is_binary(f.kind())) children.push_back(run(f.rhs()));
      return rebuild(f, std::move(children));
    }
    }
  }
};

Term rename_term(const Term& t, const std::map<std::string, std::string>& renaming) {
  if (t.is_variable()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(rename_term(a, renaming));
  auto it = renaming.find(t.name());
  return Term::apply(it == renaming.end() ? t.name() : it->second, std::move(args));
}

struct SymbolRenamer {
  const std::map<std::string, std::string>& renaming;
  std::unordered_map<const FormulaNode*, Formula> cache{};

  Formula run(const Formula& f) {
    if (auto it = cache.find(f.node()); it != cache.end()) return it->second;
    Formula out = rewrite(f);
    cache.emplace(f.node(), out);
    return out;
  }

  Formula rewrite(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::Constant: return f;
    case FormulaKind::Metric:
      return Formula::metric(rename_term(f.terms()[0], renaming), rename_term(f.terms()[1], renaming));
    case FormulaKind::Predicate: {
      std::vector<Term> args;
      for (const auto& t : f.terms()) args.push_back(rename_term(t, renaming));
      auto it = renaming.find(f.symbol());
      return Formula::predicate(it == renaming.end() ? f.symbol() : it->second, std::move(args));
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: return rebuild(f, {run(f.body())});
    default: {
      std::vector<Formula> children{run(f.lhs())};
      if (is_binary(f.kind())) children.push_back(run(f.rhs()));
      return rebuild(f, std::move(children));
    }
    }
  }
};

} // namespace

Formula expand_abbreviations(const Formula& formula) {
  Expander expander;
  return expander.run(formula);
}

Term substitute(const Term& term, const std::map<std::string, Term>& replacement) {
  if (term.is_variable()) {
    auto it = replacement.find(term.name());
    return it == replacement.end() ? term : it->second;
  }
  std::vector<Term> args;
  for (const auto& a : term.args()) args.push_back(substitute(a, replacement));
  return Term::apply(term.name(), std::move(args));
}

Formula substitute(const Formula& formula, const std::map<std::string, Term>& replacement) {
  Substituter s{replacement};
  return s.run(formula);
}

Formula rename_symbols(const Formula& formula, const std::map<std::string, std::string>& renaming) {
  SymbolRenamer r{renaming};
  return r.run(formula);
}

} // namespace pavelka
