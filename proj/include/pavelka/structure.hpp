#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pavelka/rational.hpp"
#include "pavelka/syntax.hpp"

namespace pavelka {

// Elements are indices into the universe, ordered by declaration.
using Element = std::uint32_t;
using Tuple = std::vector<Element>;

struct PredicateTable {
  int arity = 0;
  std::vector<Rational> values; // row-major over universe^arity
  friend bool operator==(const PredicateTable&, const PredicateTable&) = default;
};

struct OperationTable {
  int arity = 0;
  std::vector<Element> values; // row-major over universe^arity
  friend bool operator==(const OperationTable&, const OperationTable&) = default;
};

// Finite one-sorted [0,1]-valued metric structure. Constants are arity-0
// operations. Mutators exist for construction; every library operation treats
// a structure as an immutable value.
class Structure {
public:
  Structure() = default;
  // New structure with the discrete metric (all off-diagonal distances 1).
  explicit Structure(std::vector<std::string> universe);

  std::size_t size() const { return universe_.size(); }
  const std::vector<std::string>& universe() const { return universe_; }
  const std::string& name(Element e) const { return universe_.at(e); }
  std::optional<Element> find(const std::string& name) const;
  Element element(const std::string& name) const; // throws if absent

  const Rational& distance(Element a, Element b) const { return metric_[a * size() + b]; }
  void set_distance(Element a, Element b, const Rational& value) { metric_.at(a * size() + b) = value; }
  void set_distance_symmetric(Element a, Element b, const Rational& value);
  const std::vector<Rational>& metric() const { return metric_; }

  void add_predicate(const std::string& name, int arity, const Rational& fill = Rational(0));
  void set_predicate(const std::string& name, std::span<const Element> args, const Rational& value);
  const Rational& predicate(const std::string& name, std::span<const Element> args) const;
  const PredicateTable& predicate_table(const std::string& name) const;
  PredicateTable& predicate_table(const std::string& name);

  void add_operation(const std::string& name, int arity, Element fill = 0);
  void set_operation(const std::string& name, std::span<const Element> args, Element value);
  Element operation(const std::string& name, std::span<const Element> args) const;
  const OperationTable& operation_table(const std::string& name) const;
  OperationTable& operation_table(const std::string& name);

  void add_constant(const std::string& name, Element value) {
    add_operation(name, 0, value);
  }
  Element constant(const std::string& name) const { return operation(name, {}); }

  const std::map<std::string, PredicateTable>& predicates() const { return predicates_; }
  const std::map<std::string, OperationTable>& operations() const { return operations_; }
  void remove_symbol(const std::string& name);

  Vocabulary vocabulary() const;

  // Row-major index of a tuple over a universe of `n` elements.
  static std::size_t tuple_index(std::span<const Element> args, std::size_t n);
  Tuple tuple_at(std::size_t index, int arity) const;
  std::size_t tuple_count(int arity) const;

  friend bool operator==(const Structure&, const Structure&) = default;

private:
  std::vector<std::string> universe_;
  std::vector<Rational> metric_;
  std::map<std::string, PredicateTable> predicates_;
  std::map<std::string, OperationTable> operations_;
};

// Calls `visit` with every tuple of the given arity, in lexicographic order.
void for_each_tuple(std::size_t universe_size, int arity, const std::function<void(const Tuple&)>& visit);

struct Violation {
  std::string kind;   // "metric-zero", "metric-symmetry", "metric-triangle", "metric-identity", "range", "modulus", "lipschitz"
  std::string symbol; // empty for metric axioms
  std::vector<std::string> witness;
  std::vector<std::string> values;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
};

// Bijection on symbol names; kind and arity are carried over unchanged.
struct Renaming {
  std::map<std::string, std::string> map;

  // Identity on symbols of `vocabulary` not mentioned in `map`.
  Renaming completed(const Vocabulary& vocabulary) const;
  // Throws if not total on `vocabulary`, not injective, or a target is invalid.
  void check(const Vocabulary& vocabulary) const;
};

// Metric axioms, ranges, and every sampled modulus of the signature.
ValidationReport validate_structure(const Structure& m, const Signature& signature);
// Metric axioms and ranges only.
ValidationReport validate_metric_and_ranges(const Structure& m);

Structure reduct(const Structure& m, const Vocabulary& sub);
Structure rename(const Structure& m, const Renaming& renaming);
Signature rename(const Signature& s, const Renaming& renaming);

// Substructure on the given elements (kept in universe order). The subset must
// contain every constant and be closed under every operation.
Structure induced_substructure(const Structure& m, std::span<const Element> subset);
// Least superset of `seed` and the constants closed under every operation.
std::vector<Element> generated_closure(const Structure& m, std::span<const Element> seed);
Structure generated_substructure(const Structure& m, std::span<const Element> seed);

// Names used by the combined structure [M0, M1].
std::string component_symbol(const std::string& symbol, int component);
std::string membership_predicate(int component);
std::string component_element(const std::string& element, int component);
Renaming component_renaming(const Vocabulary& vocabulary, int component);

// Disjoint union with cross distances 1, per-component copies of every symbol
// (0 on mixed tuples for predicates, the first element of M0 for operations),
// and monadic membership predicates.
Structure combine(const Structure& m0, const Structure& m1);
// Signature of the combined structure: each component symbol keeps the moduli
// of its source symbol; the membership predicates get no samples.
Signature combine_signature(const Signature& s);

ValidationReport lipschitz_check(const Structure& m);

// (a ~ b) = 1 - d(a, b), row-major.
std::vector<Rational> similarity_view(const Structure& m);
std::vector<Rational> metric_from_similarity(std::span<const Rational> similarity);

} // namespace pavelka
