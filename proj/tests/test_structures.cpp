#include <doctest.h>

#include <array>

#include "pavelka/error.hpp"
#include "pavelka/evaluator.hpp"
#include "pavelka/io.hpp"
#include "pavelka/structure.hpp"

#include "support/generators.hpp"
#include "support/naive_eval.hpp"

using namespace pavelka;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

bool has_kind(const ValidationReport& r, const std::string& kind) {
  for (const auto& v : r.violations)
    if (v.kind == kind) return true;
  return false;
}

// Brute-force oracle for the metric axioms.
bool is_metric(const Structure& m) {
  Element n = Element(m.size());
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b) {
      const Rational& d = m.distance(a, b);
      if (!d.in_unit_interval()) return false;
      if ((a == b) != (d == Rational(0))) return false;
      if (d != m.distance(b, a)) return false;
      for (Element c = 0; c < n; ++c)
        if (d > m.distance(a, c) + m.distance(c, b)) return false;
    }
  return true;
}

Rational sup_distance(const Structure& m, const Tuple& a, const Tuple& b) {
  Rational out(0);
  for (std::size_t i = 0; i < a.size(); ++i) out = max(out, m.distance(a[i], b[i]));
  return out;
}

bool is_lipschitz(const Structure& m) {
  bool ok = true;
  for (const auto& [name, table] : m.predicates())
    for_each_tuple(m.size(), table.arity, [&](const Tuple& a) {
      for_each_tuple(m.size(), table.arity, [&](const Tuple& b) {
        if (abs(m.predicate(name, a) - m.predicate(name, b)) > sup_distance(m, a, b)) ok = false;
      });
    });
  for (const auto& [name, table] : m.operations())
    for_each_tuple(m.size(), table.arity, [&](const Tuple& a) {
      for_each_tuple(m.size(), table.arity, [&](const Tuple& b) {
        if (m.distance(m.operation(name, a), m.operation(name, b)) > sup_distance(m, a, b)) ok = false;
      });
    });
  return ok;
}

} // namespace

TEST_CASE("tables and lookups") {
  Structure m({"a", "b", "c"});
  CHECK(m.distance(0, 1) == Rational(1));
  CHECK(m.distance(2, 2) == Rational(0));
  m.add_predicate("R", 2);
  m.set_predicate("R", std::array<Element, 2>{2, 1}, Rational(1, 3));
  CHECK(m.predicate("R", std::array<Element, 2>{2, 1}) == Rational(1, 3));
  CHECK(m.predicate_table("R").values[Structure::tuple_index(std::array<Element, 2>{2, 1}, 3)] == Rational(1, 3));
  CHECK(m.tuple_at(7, 2) == Tuple{2, 1});
  CHECK(m.tuple_count(3) == 27);
  m.add_constant("k", 2);
  CHECK(m.constant("k") == 2);
  CHECK(m.element("b") == 1);
  CHECK_FALSE(m.find("z"));
  CHECK_THROWS_AS(m.element("z"), Error);
  CHECK_THROWS_AS(Structure(std::vector<std::string>{}), Error);
  CHECK_THROWS_AS(Structure(std::vector<std::string>{"a", "a"}), Error);
  Vocabulary v = m.vocabulary();
  CHECK(v.predicate_arity("R") == 2);
  CHECK(v.operation_arity("k") == 0);
  m.remove_symbol("R");
  CHECK_FALSE(m.vocabulary().contains("R"));

  std::vector<Tuple> seen;
  for_each_tuple(2, 2, [&](const Tuple& t) { seen.push_back(t); });
  CHECK(seen == std::vector<Tuple>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("metric validation agrees with a brute-force checker") {
  gen::Rng rng(14);
  Vocabulary v;
  v.add_predicate("P", 1);
  for (int i = 0; i < 400; ++i) {
    Structure m = gen::random_structure(rng, v, 4);
    // perturb some entries, possibly breaking the axioms
    for (int k = 0; k < 2; ++k) {
      Element a = Element(gen::uniform(rng, 0, int(m.size()) - 1));
      Element b = Element(gen::uniform(rng, 0, int(m.size()) - 1));
      if (gen::coin(rng)) m.set_distance(a, b, gen::unit_rational(rng, 6));
    }
    CHECK(validate_metric_and_ranges(m).pass() == is_metric(m));
  }
  Structure bad({"a", "b", "c"});
  bad.set_distance_symmetric(0, 1, Rational(1, 4));
  bad.set_distance_symmetric(1, 2, Rational(1, 4));
  CHECK(has_kind(validate_metric_and_ranges(bad), "metric-triangle"));
  bad.set_distance(0, 0, Rational(1, 2));
  CHECK(has_kind(validate_metric_and_ranges(bad), "metric-zero"));
  Structure zero({"a", "b"});
  zero.set_distance_symmetric(0, 1, Rational(0));
  CHECK(has_kind(validate_metric_and_ranges(zero), "metric-identity"));
  Structure lopsided({"a", "b"});
  lopsided.set_distance(0, 1, Rational(1, 2));
  CHECK(has_kind(validate_metric_and_ranges(lopsided), "metric-symmetry"));
  Structure range({"a"});
  range.add_predicate("P", 1, Rational(3, 2));
  CHECK(has_kind(validate_metric_and_ranges(range), "range"));
}

TEST_CASE("moduli and vocabulary checks") {
  Structure m({"a", "b"});
  m.set_distance_symmetric(0, 1, Rational(1, 4));
  m.add_predicate("P", 1);
  m.set_predicate("P", std::array<Element, 1>{1}, Rational(1, 2));
  Signature s;
  s.vocabulary = m.vocabulary();
  s.moduli["P"] = {{Rational(1, 3), Rational(1, 2)}};
  // d = 1/4 < 1/2 but the gap 1/2 exceeds 1/3
  ValidationReport r = validate_structure(m, s);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == "modulus");
  CHECK(r.violations[0].witness == std::vector<std::string>{"a", "b"});
  s.moduli["P"] = {{Rational(1, 3), Rational(1, 4)}};
  CHECK(validate_structure(m, s).pass()); // distance 1/4 is not below 1/4
  Signature wrong;
  wrong.vocabulary.add_predicate("Q", 1);
  CHECK(kind_of([&] { validate_structure(m, wrong); }) == ErrorKind::VocabularyMismatch);
}

TEST_CASE("lipschitz check agrees with the definition") {
  gen::Rng rng(15);
  Vocabulary v;
  v.add_predicate("P", 1);
  v.add_operation("f", 1);
  std::size_t lipschitz = 0;
  for (int i = 0; i < 300; ++i) {
    Structure m = gen::random_structure(rng, v, 3, 4);
    bool expected = is_lipschitz(m);
    lipschitz += expected;
    CHECK(lipschitz_check(m).pass() == expected);
  }
  CHECK(lipschitz > 0);
}

TEST_CASE("reducts and renamings") {
  gen::Rng rng(16);
  Vocabulary v = gen::standard_vocabulary();
  Structure m = gen::random_structure(rng, v, 3);
  Vocabulary sub;
  sub.add_predicate("P", 1);
  sub.add_constant("c");
  Structure r = reduct(m, sub);
  CHECK(r.vocabulary() == sub);
  CHECK(r.predicate_table("P") == m.predicate_table("P"));
  Vocabulary alien;
  alien.add_predicate("Z", 1);
  CHECK(kind_of([&] { reduct(m, alien); }) == ErrorKind::VocabularyMismatch);

  Renaming ren{{{"P", "S"}, {"f", "h"}}};
  Structure n = rename(m, ren);
  CHECK(n.predicate_table("S") == m.predicate_table("P"));
  CHECK(n.operation_table("h") == m.operation_table("f"));
  CHECK(n.vocabulary().predicate_arity("R") == 2);
  // renaming commutes with evaluation
  Formula phi = parse_formula("E x. P(f(x)) -> R(x, c)", v);
  Formula renamed = rename_symbols(phi, ren.completed(v).map);
  CHECK(eval(n, renamed) == eval(m, phi));

  CHECK_THROWS_AS(rename(m, Renaming{{{"P", "R"}}}), Error);   // collides with R
  CHECK_THROWS_AS(rename(m, Renaming{{{"Zed", "Y"}}}), Error); // unknown source
  CHECK_THROWS_AS(rename(m, Renaming{{{"P", "d"}}}), Error);   // reserved

  Signature s;
  s.vocabulary = v;
  s.moduli["P"] = {{Rational(1, 2), Rational(1, 2)}};
  Signature t = rename(s, ren);
  CHECK(t.moduli.count("S") == 1);
  CHECK(t.vocabulary.predicate_arity("S") == 1);
}

TEST_CASE("substructures") {
  Structure m({"a", "b", "c", "d2"});
  m.add_operation("f", 1);
  m.set_operation("f", std::array<Element, 1>{0}, 1);
  m.set_operation("f", std::array<Element, 1>{1}, 0);
  m.set_operation("f", std::array<Element, 1>{2}, 3);
  m.set_operation("f", std::array<Element, 1>{3}, 3);
  m.add_constant("c0", 2);
  m.add_predicate("P", 1, Rational(1, 2));
  m.set_distance_symmetric(0, 1, Rational(1, 2));
  m.set_distance_symmetric(2, 3, Rational(1, 3));

  auto closure = generated_closure(m, std::array<Element, 1>{0});
  CHECK(closure == std::vector<Element>{0, 1, 2, 3});
  Structure small({"a", "b"});
  small.add_operation("f", 1);
  small.set_operation("f", std::array<Element, 1>{0}, 1);
  CHECK(generated_closure(small, std::array<Element, 1>{1}) == std::vector<Element>{0, 1});

  std::array<Element, 2> keep{2, 3};
  Structure sub = induced_substructure(m, keep);
  CHECK(sub.universe() == std::vector<std::string>{"c", "d2"});
  CHECK(sub.distance(0, 1) == Rational(1, 3));
  CHECK(sub.constant("c0") == 0);
  CHECK(sub.operation("f", std::array<Element, 1>{0}) == 1);
  CHECK(kind_of([&] { induced_substructure(m, std::array<Element, 2>{0, 2}); }) == ErrorKind::OperationEscapes);
  CHECK(kind_of([&] { induced_substructure(m, std::array<Element, 1>{3}); }) == ErrorKind::OperationEscapes);
  CHECK(kind_of([&] { induced_substructure(m, std::span<const Element>{}); }) == ErrorKind::EmptyRestriction);
  CHECK(generated_substructure(m, std::array<Element, 1>{3}).universe() == std::vector<std::string>{"c", "d2"});
}

TEST_CASE("combined structure") {
  gen::Rng rng(17);
  Vocabulary v = gen::standard_vocabulary();
  for (int i = 0; i < 40; ++i) {
    Structure m0 = gen::random_structure(rng, v, 3);
    Structure m1 = gen::random_structure(rng, v, 3);
    Structure both = combine(m0, m1);
    REQUIRE(both.size() == m0.size() + m1.size());
    CHECK(validate_metric_and_ranges(both).pass());
    CHECK(both.universe()[0] == component_element(m0.universe()[0], 0));
    Element off = Element(m0.size());
    CHECK(both.distance(0, off) == Rational(1));
    for (Element a = 0; a < m1.size(); ++a)
      for (Element b = 0; b < m1.size(); ++b) CHECK(both.distance(off + a, off + b) == m1.distance(a, b));
    CHECK(both.predicate(membership_predicate(0), std::array<Element, 1>{0}) == Rational(1));
    CHECK(both.predicate(membership_predicate(1), std::array<Element, 1>{0}) == Rational(0));
    CHECK(both.predicate(membership_predicate(1), std::array<Element, 1>{off}) == Rational(1));
    // mixed tuples: predicates 0, operations to the designated element
    CHECK(both.predicate(component_symbol("R", 1), std::array<Element, 2>{0, off}) == Rational(0));
    CHECK(both.operation(component_symbol("g", 0), std::array<Element, 2>{off, 0}) == 0);
    CHECK(both.constant(component_symbol("c", 1)) == off + m1.constant("c"));
    for (Element a = 0; a < m1.size(); ++a)
      CHECK(both.operation(component_symbol("f", 1), std::array<Element, 1>{off + a}) ==
            off + m1.operation("f", std::array<Element, 1>{a}));
  }
  Signature s;
  s.vocabulary = v;
  s.moduli["P"] = {{Rational(1, 2), Rational(1, 4)}};
  Signature cs = combine_signature(s);
  CHECK(cs.moduli.at(component_symbol("P", 0)).size() == 1);
  CHECK(cs.moduli.at(component_symbol("P", 1)).size() == 1);
  CHECK(cs.vocabulary.predicate_arity(membership_predicate(0)) == 1);
}

TEST_CASE("similarity view") {
  gen::Rng rng(18);
  for (int i = 0; i < 50; ++i) {
    Structure m = gen::random_structure(rng, Vocabulary{}, 4);
    auto sim = similarity_view(m);
    for (Element a = 0; a < m.size(); ++a)
      for (Element b = 0; b < m.size(); ++b)
        CHECK(sim[a * m.size() + b] == Rational(1) - m.distance(a, b));
    CHECK(metric_from_similarity(sim) == m.metric());
  }
}

TEST_CASE("structure JSON round trip and errors") {
  gen::Rng rng(19);
  Vocabulary v = gen::standard_vocabulary();
  for (int i = 0; i < 100; ++i) {
    Structure m = gen::random_structure(rng, v, 4);
    auto j = io::to_json(m);
    CHECK(io::structure_from_json(j) == m);
    CHECK(io::structure_from_json(io::Json::parse(j.dump())) == m);
  }
  auto parse = [](const char* text) { return io::structure_from_json(io::Json::parse(text)); };
  Structure m = parse(R"({"universe": ["a", "b"], "metric": {"b,a": "1/2"},
                          "predicates": {"P": {"a": 1, "b": "0.5"}, "Q": "1/4"},
                          "operations": {"f": {"a": "b", "b": "a"}}, "constants": {"c": "b"}})");
  CHECK(m.distance(0, 1) == Rational(1, 2));
  CHECK(m.predicate("P", std::array<Element, 1>{1}) == Rational(1, 2));
  CHECK(m.predicate("Q", {}) == Rational(1, 4));
  CHECK(m.constant("c") == 1);
  CHECK_THROWS_AS(parse(R"({"universe": ["a", "b"], "metric": {}})"), Error);
  CHECK_THROWS_AS(parse(R"({"universe": ["a", "b"], "metric": {"a,b": 1}, "predicates": {"P": {"a": 1}}})"), Error);
  CHECK_THROWS_AS(parse(R"({"universe": ["a"], "metric": {}, "constants": {"c": "z"}})"), Error);
}
