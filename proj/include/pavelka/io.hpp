#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pavelka/connectives.hpp"
#include "pavelka/evaluator.hpp"
#include "pavelka/structure.hpp"
#include "pavelka/syntax.hpp"
#include "pavelka/types.hpp"

namespace pavelka::io {

using Json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);

// Rationals are written as "p/q"; reads also accept integers and decimals.
Rational rational_from_json(const Json& j);
Json to_json(const Rational& r);

// {"universe": [...], "metric": {"a,b": "p/q"}, "predicates": {"P": {"a": v}},
//  "operations": {"f": {"a": "b"}}, "constants": {"c": "a"}}
// Metric pairs may be given in one orientation; the diagonal is implicit.
// A 0-ary predicate uses the key "" (or a bare value).
Structure structure_from_json(const Json& j);
Json to_json(const Structure& m);
Structure load_structure(const std::filesystem::path& path);

// {"predicates": {"P": 1}, "operations": {"f": 2}, "constants": ["c"]}
Vocabulary vocabulary_from_json(const Json& j);
Json to_json(const Vocabulary& v);
// Same keys plus "moduli": {"P": [["eps", "delta"], ...]}. A file not ending
// in .json is read as a vocabulary in line format with no moduli.
Signature signature_from_json(const Json& j);
Signature load_signature(const std::filesystem::path& path);

// {"name": ..., "sentences": ["..."]} or a bare array of formula strings.
Theory theory_from_json(const Json& j, const Vocabulary& v);
Json to_json(const Theory& t);
// {"name": ..., "variables": ["x"], "formulas": ["..."]}
TypeSet typeset_from_json(const Json& j, const Vocabulary& v);
Json to_json(const TypeSet& t);
// Array of type sets, or {"types": [...]}.
std::vector<TypeSet> typesets_from_json(const Json& j, const Vocabulary& v);

// {"vocabulary": {...}, "max_size", "truth_grid", "metric_grid", "seed"}
SearchSpace search_space_from_json(const Json& j);
// {"arity": n, "groups": [[{"coefficients": [...], "intercept": r}]]}
PLSpec plspec_from_json(const Json& j);
// {"kind": "omega", "variables", "terms", "formula", "r"}
OmegaCandidate omega_candidate_from_json(const Json& j, const Vocabulary& v);
// Omega candidate, or a type set ({"kind": "generator", ...}).
PrincipalCandidate principal_candidate_from_json(const Json& j, const Vocabulary& v);

// A directory of structure files (sorted by file name), or one JSON file with
// an array of structures.
struct Family {
  std::vector<std::string> names;
  std::vector<Structure> structures;
  Vocabulary vocabulary() const;
};
Family load_family(const std::filesystem::path& path);

Json tuple_json(const Structure& m, std::span<const Element> tuple);
Json to_json(const ValidationReport& r);
Json to_json(const TheoryReport& r);
Json to_json(const EntailmentResult& r, const Family& family);
Json to_json(const GeneratorReport& r, const Family& family);
Json to_json(const OmegaReport& r, const Family& family);

} // namespace pavelka::io
