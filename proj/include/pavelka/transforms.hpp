#pragma once

#include <optional>
#include <string>

#include "pavelka/error.hpp"
#include "pavelka/structure.hpp"
#include "pavelka/syntax.hpp"

namespace pavelka {

// phi \/ ~phi for an atomic phi (predicate or metric atom), expanded to core.
Formula discrete_macro(const Formula& atom);

// Guarded relativization: E x. psi becomes E x. (P(x) /\ psi^P) and A x. psi
// becomes A x. (~P(x) \/ psi^P). Atoms and constants are unchanged; every
// connective commutes. The output keeps derived connectives.
Formula relativize_monadic(const Formula& phi, const std::string& predicate);

struct FamilyRelativization {
  Formula formula;
  std::string parameter; // the one free variable
};

// Relativization of a sentence to {y | R(x, y)}; x is chosen fresh.
FamilyRelativization relativize_family(const Formula& sentence, const std::string& relation);

// M restricted to {a | P(a) = 1}, with P removed; or the reason it is undefined.
struct Restriction {
  std::optional<Structure> structure;
  ErrorKind failure = ErrorKind::InvalidArgument;
  std::string reason;
  bool defined() const { return structure.has_value(); }
};

Restriction try_restrict_to_predicate(const Structure& m, const std::string& predicate);
// Throws NonDiscrete, EmptyRestriction or OperationEscapes.
Structure restrict_to_predicate(const Structure& m, const std::string& predicate);
// M restricted to {b | R(a, b) = 1}, with R removed.
Restriction try_restrict_to_family(const Structure& m, const std::string& relation, Element a);

struct OrderTheorySpec {
  std::string predicate; // P, monadic
  std::string relation;  // the binary order symbol
};

// The seven sentences describing a discrete linear ordering, expanded to core.
Theory order_theory(const OrderTheorySpec& spec, const Vocabulary& base = {});
Vocabulary order_vocabulary(const OrderTheorySpec& spec, const Vocabulary& base = {});

// Sigma^delta: E y1..E yn (d(x1,y1) <= delta /\ ... /\ sigma(y)) for sigma the
// conjunction of each nonempty subset of Sigma with at most `bound` members
// (default: all), always including the full conjunction.
TypeSet thicken(const TypeSet& sigma, const Rational& delta, std::optional<std::size_t> bound = std::nullopt);

} // namespace pavelka
