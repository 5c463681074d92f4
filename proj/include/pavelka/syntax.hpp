#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pavelka/rational.hpp"

namespace pavelka {

// Predicate and operation symbols with their arities. The metric symbol `d` is
// implicit. Arity-0 operations are constants.
class Vocabulary {
public:
  void add_predicate(const std::string& name, int arity);
  void add_operation(const std::string& name, int arity);
  void add_constant(const std::string& name) { add_operation(name, 0); }

  std::optional<int> predicate_arity(const std::string& name) const;
  std::optional<int> operation_arity(const std::string& name) const;
  bool contains(const std::string& name) const;
  bool empty() const { return predicates_.empty() && operations_.empty(); }

  const std::map<std::string, int>& predicates() const { return predicates_; }
  const std::map<std::string, int>& operations() const { return operations_; }
  std::vector<std::string> constants() const;

  // Every symbol of *this occurs in `other` with the same kind and arity.
  bool is_subvocabulary_of(const Vocabulary& other) const;
  Vocabulary merged(const Vocabulary& other) const;

  // Line format: `pred P 1`, `op f 2`, `const c`; `#` starts a comment.
  static Vocabulary parse(std::string_view text);
  std::string to_text() const;

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

private:
  void check_new_name(const std::string& name, int arity) const;

  std::map<std::string, int> predicates_;
  std::map<std::string, int> operations_;
};

bool is_identifier(std::string_view name);
// Identifiers that the grammar reserves: `d`, `E`, `A`.
bool is_reserved(std::string_view name);

// A single (epsilon, delta) sample of a uniform continuity modulus.
struct Modulus {
  Rational epsilon;
  Rational delta;
  friend bool operator==(const Modulus&, const Modulus&) = default;
};

struct Signature {
  Vocabulary vocabulary;
  std::map<std::string, std::vector<Modulus>> moduli;

  // Throws on moduli for unknown symbols or pairs outside (0,1).
  void check() const;
  const std::vector<Modulus>& moduli_for(const std::string& symbol) const;
};

class Term {
public:
  enum class Kind { Variable, Apply };

  static Term variable(std::string name);
  // Constants are applications with no arguments.
  static Term apply(std::string function, std::vector<Term> args = {});

  Kind kind() const { return kind_; }
  bool is_variable() const { return kind_ == Kind::Variable; }
  const std::string& name() const { return name_; }
  const std::vector<Term>& args() const { return args_; }

  friend bool operator==(const Term&, const Term&) = default;

private:
  Kind kind_ = Kind::Variable;
  std::string name_;
  std::vector<Term> args_;
};

enum class FormulaKind {
  // core
  Metric,
  Predicate,
  Implies,
  Constant,
  Exists,
  // abbreviations
  Not,
  Or,
  And,
  AtMost,  // phi <= r
  AtLeast, // phi >= r
  Forall,
};

struct FormulaNode;

// Immutable formula AST. Copies share structure; subtrees may be shared
// between several parents (the tree is really a DAG).
class Formula {
public:
  static Formula metric(Term lhs, Term rhs);
  static Formula predicate(std::string symbol, std::vector<Term> args = {});
  static Formula implies(Formula lhs, Formula rhs);
  static Formula constant(Rational value);
  static Formula exists(std::string variable, Formula body);

  static Formula negation(Formula operand);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula at_most(Formula operand, Rational bound);
  static Formula at_least(Formula operand, Rational bound);
  static Formula forall(std::string variable, Formula body);

  FormulaKind kind() const;
  bool is_core_kind() const;
  bool is_atomic() const;

  // Implies / Or / And
  const Formula& lhs() const;
  const Formula& rhs() const;
  // Not / AtMost / AtLeast
  const Formula& operand() const;
  // Exists / Forall
  const Formula& body() const;
  const std::string& variable() const;
  // Constant value, or the bound of AtMost / AtLeast
  const Rational& value() const;
  // Predicate symbol
  const std::string& symbol() const;
  // Metric / Predicate arguments
  const std::vector<Term>& terms() const;

  const FormulaNode* node() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);

private:
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const FormulaNode> node_;
};

// Sugar for building finite conjunctions; the empty conjunction is Constant 1.
Formula conjunction_of(std::span<const Formula> parts);

struct Theory {
  std::string name;
  std::vector<Formula> sentences;
  friend bool operator==(const Theory&, const Theory&) = default;
};

// A finite set of formulas in the free variables `variables`.
struct TypeSet {
  std::string name;
  std::vector<std::string> variables;
  std::vector<Formula> formulas;

  // Free variables of each member are contained in `variables`; n >= 1.
  void check() const;
  friend bool operator==(const TypeSet&, const TypeSet&) = default;
};

// Parsing and rendering. Grammar:
//   formula := disj ( '->' formula )?
//   disj    := conj ( '\/' conj )*
//   conj    := cmp ( '/\' cmp )*
//   cmp     := unary ( ( '<=' | '>=' ) rational )*
//   unary   := '~' unary | ( 'E' | 'A' ) var '.' formula | atom
//   atom    := '(' formula ')' | rational | 'd' '(' term ',' term ')' | P ( '(' terms ')' )?
Formula parse_formula(std::string_view text, const Vocabulary& vocabulary);
Term parse_term(std::string_view text, const Vocabulary& vocabulary);
std::string render(const Formula& formula);
std::string render(const Term& term);

// Arity and symbol checks for a programmatically built formula.
void check_formula(const Formula& formula, const Vocabulary& vocabulary);

// Variables with a free occurrence, in order of first occurrence.
std::vector<std::string> free_variables(const Formula& formula);
std::vector<std::string> free_variables(const Term& term);
bool is_sentence(const Formula& formula);
// Every variable name occurring anywhere, bound or free.
std::set<std::string> all_variables(const Formula& formula);
// Predicate and operation symbols occurring in the formula.
std::set<std::string> symbols_of(const Formula& formula);
bool is_core(const Formula& formula);

// Rewrites every abbreviation into ->, constants, and E. Idempotent; preserves
// sharing of repeated subformulas.
Formula expand_abbreviations(const Formula& formula);

// Capture-avoiding substitution of terms for free variables.
Formula substitute(const Formula& formula, const std::map<std::string, Term>& replacement);
Term substitute(const Term& term, const std::map<std::string, Term>& replacement);

// Renames predicate/operation symbols; symbols absent from the map are kept.
Formula rename_symbols(const Formula& formula, const std::map<std::string, std::string>& renaming);

// `base`, or `base` followed by a number, avoiding every name in `taken`.
std::string fresh_variable(const std::string& base, const std::set<std::string>& taken);

} // namespace pavelka
