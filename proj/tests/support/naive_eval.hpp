#pragma once

// Reference evaluator used as the oracle in tests. It walks the formula
// directly, giving each abbreviation its intended meaning (1-x, max, min, ...)
// instead of expanding it, and shares no code with the engine.

#include <map>
#include <stdexcept>
#include <string>

#include "pavelka/structure.hpp"
#include "pavelka/syntax.hpp"

namespace naive {

using pavelka::Element;
using pavelka::Formula;
using pavelka::FormulaKind;
using pavelka::Rational;
using pavelka::Structure;
using pavelka::Term;

using Env = std::map<std::string, Element>;

inline Element term(const Structure& m, const Term& t, const Env& env) {
  if (t.is_variable()) {
    auto it = env.find(t.name());
    if (it == env.end()) throw std::runtime_error("naive: unassigned " + t.name());
    return it->second;
  }
  pavelka::Tuple args;
  for (const auto& a : t.args()) args.push_back(term(m, a, env));
  return m.operation(t.name(), args);
}

inline Rational luk(const Rational& a, const Rational& b) {
  Rational v = Rational(1) - a + b;
  return v < Rational(1) ? v : Rational(1);
}

inline Rational eval(const Structure& m, const Formula& f, const Env& env) {
  switch (f.kind()) {
  case FormulaKind::Metric:
    return m.distance(term(m, f.terms()[0], env), term(m, f.terms()[1], env));
  case FormulaKind::Predicate: {
    pavelka::Tuple args;
    for (const auto& a : f.terms()) args.push_back(term(m, a, env));
    return m.predicate(f.symbol(), args);
  }
  case FormulaKind::Constant:
    return f.value();
  case FormulaKind::Implies:
    return luk(naive::eval(m, f.lhs(), env), naive::eval(m, f.rhs(), env));
  case FormulaKind::Not:
    return Rational(1) - naive::eval(m, f.operand(), env);
  case FormulaKind::Or:
    return pavelka::max(naive::eval(m, f.lhs(), env), naive::eval(m, f.rhs(), env));
  case FormulaKind::And:
    return pavelka::min(naive::eval(m, f.lhs(), env), naive::eval(m, f.rhs(), env));
  case FormulaKind::AtMost:
    return luk(naive::eval(m, f.operand(), env), f.value());
  case FormulaKind::AtLeast:
    return luk(f.value(), naive::eval(m, f.operand(), env));
  case FormulaKind::Exists:
  case FormulaKind::Forall: {
    bool ex = f.kind() == FormulaKind::Exists;
    Rational best = ex ? Rational(0) : Rational(1);
    Env inner = env;
    for (Element e = 0; e < m.size(); ++e) {
      inner[f.variable()] = e;
      Rational v = naive::eval(m, f.body(), inner);
      best = ex ? pavelka::max(best, v) : pavelka::min(best, v);
    }
    return best;
  }
  }
  throw std::logic_error("naive: unknown formula kind");
}

inline Rational eval(const Structure& m, const Formula& f) { return naive::eval(m, f, Env{}); }

// Every sentence has value exactly 1.
inline bool models(const Structure& m, const pavelka::Theory& t) {
  for (const auto& s : t.sentences)
    if (naive::eval(m, s) != Rational(1)) return false;
  return true;
}

inline bool realizes(const Structure& m, const pavelka::Tuple& tuple, const pavelka::TypeSet& type) {
  Env env;
  for (std::size_t i = 0; i < type.variables.size(); ++i) env[type.variables[i]] = tuple[i];
  for (const auto& f : type.formulas)
    if (naive::eval(m, f, env) != Rational(1)) return false;
  return true;
}

inline bool omits(const Structure& m, const pavelka::TypeSet& type) {
  bool found = false;
  pavelka::for_each_tuple(m.size(), static_cast<int>(type.variables.size()), [&](const pavelka::Tuple& t) {
    if (!found && naive::realizes(m, t, type)) found = true;
  });
  return !found;
}

} // namespace naive
