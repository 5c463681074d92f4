#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pavelka/rational.hpp"
#include "pavelka/structure.hpp"
#include "pavelka/syntax.hpp"

namespace pavelka {

using Assignment = std::map<std::string, Element>;

// Evaluates formulas in one fixed structure. Compiled formulas and memoized
// subformula values are kept between calls, so reuse one Evaluator when many
// formulas or assignments are checked against the same structure. Not
// thread-safe; use one instance per thread.
class Evaluator {
public:
  explicit Evaluator(const Structure& m);
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const Structure& structure() const { return m_; }

  Rational eval(const Formula& formula, const Assignment& assignment = {});
  // Free variables bound positionally: vars[i] := values[i].
  Rational eval(const Formula& formula, std::span<const std::string> vars, std::span<const Element> values);

private:
  struct Impl;
  const Structure& m_;
  std::unique_ptr<Impl> impl_;
};

Rational eval(const Structure& m, const Formula& formula, const Assignment& assignment = {});
// Value is exactly 1. Throws NotSentence on free variables.
bool satisfies(const Structure& m, const Formula& sentence);

struct TheoryFailure {
  std::size_t index;
  Formula sentence;
  Rational value;
};

struct TheoryReport {
  bool satisfied = true;
  std::vector<TheoryFailure> failing;
};

TheoryReport check_theory(const Structure& m, const Theory& theory);
TheoryReport check_theory(Evaluator& evaluator, const Theory& theory);

struct Counterexample {
  std::size_t structure_index;
  Tuple tuple;
  std::size_t formula_index; // index into the violated type set
  Formula formula;
  Rational value;
};

struct EntailmentResult {
  bool holds = true;
  std::optional<Counterexample> counterexample;
};

// Every realization of gamma in a model of T within the family realizes sigma.
EntailmentResult entails(std::span<const Structure> family, const Theory& theory, const TypeSet& gamma,
                         const TypeSet& sigma);

struct TarskiVaughtFailure {
  std::size_t formula_index;
  Rational r;
  Rational best; // largest value of phi over A
};

struct TarskiVaughtReport {
  std::vector<TarskiVaughtFailure> failures;
  bool pass() const { return failures.empty(); }
};

// Vocabulary of M extended by one constant per element of A, named after it.
Vocabulary named_vocabulary(const Structure& m, std::span<const Element> subset);
Structure name_elements(const Structure& m, std::span<const Element> subset);

// For each phi(x) and r in the grid: when (E x. phi) has value 1 in M, some a
// in A must satisfy phi(a) >= r. Formulas may use the element-name constants
// of `name_elements`.
TarskiVaughtReport tarski_vaught_check(const Structure& m, std::span<const Element> subset,
                                       std::span<const Formula> formulas, std::span<const Rational> grid);

} // namespace pavelka
