#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pavelka/evaluator.hpp"
#include "pavelka/structure.hpp"
#include "pavelka/syntax.hpp"

namespace pavelka {

bool realizes(const Structure& m, std::span<const Element> tuple, const TypeSet& type);
bool realizes(Evaluator& evaluator, std::span<const Element> tuple, const TypeSet& type);

struct OmissionWitness {
  Tuple tuple;
  std::size_t formula_index;
  Rational value;
};

struct OmissionReport {
  bool omitted = true;
  std::vector<OmissionWitness> witnesses; // one per tuple when omitted
  std::optional<Tuple> realizer;          // first realizing tuple otherwise
};

OmissionReport omits(const Structure& m, const TypeSet& type);
OmissionReport omits(Evaluator& evaluator, const TypeSet& type);

// Why a structure of the family has no model-of-T realization of Phi: either
// a failing sentence of T, or for every tuple a member of Phi below 1.
struct UnsatWitness {
  std::size_t structure_index;
  std::optional<TheoryFailure> theory_failure;
  std::vector<OmissionWitness> tuples;
};

struct GeneratorReport {
  bool holds = false;
  bool satisfiable = false;
  std::optional<std::pair<std::size_t, Tuple>> realization; // clause (i) witness
  std::vector<UnsatWitness> unsatisfiable;                   // when clause (i) fails
  EntailmentResult entailment;                               // clause (ii)
};

GeneratorReport generator_check(std::span<const Structure> family, const Theory& theory, const TypeSet& phi,
                                const TypeSet& sigma);

struct OmegaCandidate {
  std::vector<std::string> variables; // y1..ym
  std::vector<Term> terms;            // t1(y)..tn(y), one per variable of Sigma
  Formula formula;                    // phi(y)
  Rational r;
};

struct OmegaReport {
  bool holds = false;
  TypeSet substituted;           // Sigma(t1(y), ..., tn(y)) over y
  GeneratorReport generator;     // {phi} generates the substituted type
  EntailmentResult threshold;    // T + {phi >= r} entails it
};

OmegaReport omega_principal_check(std::span<const Structure> family, const Theory& theory, const TypeSet& sigma,
                                  const OmegaCandidate& candidate);

// Psi(x) = { E y (d(x1,t1(y)) <= 0 /\ ... /\ d(xn,tn(y)) <= 0 /\ conj(Phi)) },
// where Phi is over the candidate variables y.
TypeSet term_substitution_generator(const std::vector<std::string>& x, const std::vector<std::string>& y,
                                    const std::vector<Term>& terms, const TypeSet& phi);

struct SearchSpace {
  Vocabulary vocabulary;
  int max_size = 1;
  int truth_grid = 1;  // predicate values in {0, 1/g, ..., 1}
  int metric_grid = 1; // off-diagonal distances in {1/h, ..., 1}
  std::uint64_t seed = 0; // 0: canonical value order

  void check() const;
};

struct SearchResult {
  std::optional<Structure> model;
  std::uint64_t examined = 0;
};

// First structure in canonical order that models T and omits every type.
SearchResult search_model(const SearchSpace& space, const Theory& theory, std::span<const TypeSet> types,
                          int workers = 1);
// Number of candidate structures of the given universe size.
std::uint64_t search_space_size(const SearchSpace& space, int size);

// Configured formula corpus in variables x1..xn: atomic formulas over variables
// and constants, plus their <= r and >= r forms for r in {0, 1/g, ..., 1}.
TypeSet default_corpus(const Vocabulary& vocabulary, int n, int grid = 4);

struct TypeRecord {
  std::size_t structure_index;
  Tuple tuple;
};

struct TypeDistance {
  Rational distance;      // path closure of the raw distances, capped at 1
  Rational raw;           // direct minimum over common models, 1 if none
  bool common_model = false;
};

TypeDistance type_distance(std::span<const Structure> family, const Theory& theory, const TypeRecord& p,
                           const TypeRecord& q, const TypeSet& corpus);

struct GeneratorCandidate {
  TypeSet phi;
};

using PrincipalCandidate = std::variant<GeneratorCandidate, OmegaCandidate>;

struct DeltaVerdict {
  Rational delta;
  bool holds = false;
  TypeSet thickened;
  std::optional<GeneratorReport> generator;
  std::optional<OmegaReport> omega;
};

struct MetricPrincipalReport {
  bool holds = true;
  std::vector<DeltaVerdict> verdicts;
};

MetricPrincipalReport metrically_principal_check(std::span<const Structure> family, const Theory& theory,
                                                 const TypeSet& sigma, std::span<const Rational> deltas,
                                                 const std::map<Rational, PrincipalCandidate>& candidates);

} // namespace pavelka
