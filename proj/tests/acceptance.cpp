// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pavelka/connectives.hpp"
#include "pavelka/error.hpp"
#include "pavelka/evaluator.hpp"
#include "pavelka/io.hpp"
#include "pavelka/structure.hpp"
#include "pavelka/transforms.hpp"
#include "pavelka/types.hpp"

#include "support/generators.hpp"
#include "support/naive_eval.hpp"

namespace fs = std::filesystem;
using namespace pavelka;

namespace {

const fs::path fixtures = PAVELKA_FIXTURES;

// First failure message of a criterion; empty means pass.
struct Check {
  std::string failure;
  std::size_t cases = 0;

  bool fail(const std::string& why) {
    if (failure.empty()) failure = why;
    return false;
  }
  bool ok() const { return failure.empty(); }
};

std::string show(const Rational& r) { return r.str(); }

// 1. engine vs naive evaluator on random instances
Check exact_evaluation() {
  Check c;
  gen::Rng rng(20240601);
  Vocabulary v = gen::standard_vocabulary();
  std::vector<std::string> vars{"x", "y", "z"};
  for (int i = 0; i < 2000; ++i) {
    Structure m = gen::random_structure(rng, v, 5, 12);
    Formula f = gen::random_formula(rng, v, vars, 6);
    Assignment a = gen::random_assignment(rng, m, vars);
    Rational engine = eval(m, f, a);
    Rational oracle = naive::eval(m, f, naive::Env(a.begin(), a.end()));
    ++c.cases;
    if (engine != oracle) {
      c.fail("instance " + std::to_string(i) + ": " + render(f) + " engine " + show(engine) + " naive " + show(oracle));
      break;
    }
  }
  return c;
}

// 2. connective laws and the two inequality identities
Check algebra_laws() {
  Check c;
  gen::Rng rng(77);
  Vocabulary v = gen::standard_vocabulary();
  std::vector<std::string> vars{"x", "y"};
  for (int i = 0; i < 1000 && c.ok(); ++i) {
    Structure m = gen::random_structure(rng, v, 4, 12);
    Formula phi = gen::random_formula(rng, v, vars, 4);
    Formula psi = gen::random_formula(rng, v, vars, 4);
    Rational r = gen::unit_rational(rng), s = gen::unit_rational(rng);
    Assignment a = gen::random_assignment(rng, m, vars);
    Evaluator ev(m);
    Rational p = ev.eval(phi, a), q = ev.eval(psi, a);
    auto val = [&](const Formula& f) { return ev.eval(f, a); };
    std::string at = " at instance " + std::to_string(i);
    ++c.cases;
    if (val(Formula::negation(phi)) != Rational(1) - p) c.fail("negation" + at);
    if (val(Formula::at_most(phi, Rational(0))) != Rational(1) - p) c.fail("phi <= 0" + at);
    if (val(Formula::disjunction(phi, psi)) != max(p, q)) c.fail("disjunction" + at);
    if (val(Formula::conjunction(phi, psi)) != min(p, q)) c.fail("conjunction" + at);
    if ((val(Formula::at_most(phi, r)) == Rational(1)) != (p <= r)) c.fail("<= r" + at);
    if ((val(Formula::at_least(phi, r)) == Rational(1)) != (p >= r)) c.fail(">= r" + at);
    // identity (1)
    if (!(p <= val(Formula::at_least(phi, r)))) c.fail("identity (1)" + at);
    // identity (2), only where r+s-1 stays in [0,1]
    if (r + s >= Rational(1)) {
      Rational lhs = val(Formula::at_least(Formula::at_least(phi, r), s));
      Rational rhs = val(Formula::at_least(phi, r + s - Rational(1)));
      if (lhs != rhs) c.fail("identity (2)" + at + ": " + show(lhs) + " vs " + show(rhs));
    }
  }
  return c;
}

// 3. half_approx error on the 1/(8n) grid and the certified bound
Check half_scaling() {
  Check c;
  Oracle half{1, [](std::span<const Rational> x) { return x[0] / Rational(2); }};
  for (int n : {2, 4, 8, 16, 32, 64, 128, 256}) {
    ConnectiveTerm t = half_approx(n);
    Rational h(1, 8 * n);
    CompiledTerm run(t);
    Rational worst(0);
    for (const auto& x : grid_points(h)) {
      Rational pt[] = {x};
      worst = max(worst, abs(run(pt) - x / Rational(2)));
    }
    ++c.cases;
    if (worst > Rational(1, n)) c.fail("n=" + std::to_string(n) + " grid error " + show(worst));
    Rational bound = certify(t, half, h, Rational(1, 2));
    if (bound > Rational(1, n) + h) c.fail("n=" + std::to_string(n) + " certified bound " + show(bound));
    if (bound < worst) c.fail("n=" + std::to_string(n) + " certified bound below observed error");
  }
  return c;
}

// 4. apply_connective commutes with evaluation
Check connective_homomorphism() {
  Check c;
  gen::Rng rng(4242);
  Vocabulary v = gen::standard_vocabulary();
  std::vector<std::string> vars{"x", "y"};
  for (int i = 0; i < 500 && c.ok(); ++i) {
    int arity = gen::uniform(rng, 1, 3);
    ConnectiveTerm t = gen::random_connective(rng, arity, 5);
    std::vector<Formula> args;
    for (int k = 0; k < arity; ++k) args.push_back(gen::random_formula(rng, v, vars, 3));
    Structure m = gen::random_structure(rng, v, 4, 12);
    Assignment a = gen::random_assignment(rng, m, vars);
    Evaluator ev(m);
    std::vector<Rational> point;
    for (const auto& f : args) point.push_back(ev.eval(f, a));
    Rational lhs = ev.eval(apply_connective(t, args), a);
    Rational rhs = eval_term(t, point);
    ++c.cases;
    if (lhs != rhs) c.fail("triple " + std::to_string(i) + ": " + render(t) + " gives " + show(lhs) + " vs " + show(rhs));
  }
  return c;
}

Vocabulary relativization_vocabulary() {
  Vocabulary v;
  v.add_predicate("R", 2);
  v.add_predicate("Q", 1);
  v.add_operation("f", 1);
  v.add_constant("c");
  return v;
}

// Twenty structures with a crisp P closed under f and containing c.
std::vector<Structure> relativization_fixtures() {
  gen::Rng rng(909);
  Vocabulary v = relativization_vocabulary();
  std::vector<Structure> out;
  while (out.size() < 20) {
    Structure m = gen::random_structure(rng, v, 5, 6);
    Tuple seed;
    for (Element e = 0; e < m.size(); ++e)
      if (gen::coin(rng, 35)) seed.push_back(e);
    auto closed = generated_closure(m, seed);
    m.add_predicate("P", 1);
    for (Element e : closed) m.set_predicate("P", std::array{e}, Rational(1));
    out.push_back(m);
  }
  return out;
}

// 5. relativization against restriction, and combined structures
Check relativization() {
  Check c;
  gen::Rng rng(515);
  Vocabulary v = relativization_vocabulary();
  std::vector<Formula> corpus;
  std::set<std::string> seen;
  while (corpus.size() < 200) {
    Formula f = gen::random_sentence(rng, v, 3);
    if (seen.insert(render(f)).second) corpus.push_back(f);
  }
  std::size_t valid = 0;
  for (const auto& m : relativization_fixtures()) {
    Restriction r = try_restrict_to_predicate(m, "P");
    if (!r.defined()) continue;
    ++valid;
    Evaluator whole(m), part(*r.structure);
    for (const auto& phi : corpus) {
      ++c.cases;
      Rational lhs = whole.eval(relativize_monadic(phi, "P"));
      Rational rhs = part.eval(phi);
      if (lhs != rhs) {
        c.fail(render(phi) + ": relativized " + show(lhs) + " restricted " + show(rhs));
        return c;
      }
    }
  }
  if (valid != 20) c.fail("only " + std::to_string(valid) + " of 20 fixture pairs are valid");

  for (int i = 0; i < 50 && c.ok(); ++i) {
    Structure m0 = gen::random_structure(rng, v, 3, 12);
    Structure m1 = gen::random_structure(rng, v, 3, 12);
    Formula gamma = gen::random_sentence(rng, v, 4);
    Structure both = combine(m0, m1);
    Evaluator ev(both);
    for (int k = 0; k < 2; ++k) {
      Renaming ren = component_renaming(v, k);
      Formula gk = relativize_monadic(rename_symbols(gamma, ren.map), membership_predicate(k));
      Rational lhs = ev.eval(gk);
      Rational rhs = eval(k == 0 ? m0 : m1, gamma);
      ++c.cases;
      if (lhs != rhs) c.fail("combine " + std::to_string(i) + " component " + std::to_string(k) + ": " + render(gamma));
    }
  }
  return c;
}

bool strict_total_order(const Structure& m) {
  auto lt = [&](Element a, Element b) { return m.predicate("LT", std::array{a, b}) == Rational(1); };
  Element n = Element(m.size());
  for (Element a = 0; a < n; ++a) {
    if (lt(a, a)) return false;
    for (Element b = 0; b < n; ++b) {
      if (a != b && lt(a, b) == lt(b, a)) return false;
      for (Element e = 0; e < n; ++e)
        if (lt(a, b) && lt(b, e) && !lt(a, e)) return false;
    }
  }
  return true;
}

// 6. theta against a classical order checker, every crisp relation up to size 4
Check discrete_ordering() {
  Check c;
  Theory theta = order_theory({"P", "LT"});
  for (std::size_t n = 1; n <= 4; ++n) {
    Structure m(gen::element_names(n));
    m.add_predicate("P", 1, Rational(1));
    m.add_predicate("LT", 2);
    std::size_t cells = n * n;
    for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << cells); ++bits) {
      for (std::size_t i = 0; i < cells; ++i)
        m.predicate_table("LT").values[i] = Rational((bits >> i) & 1 ? 1 : 0);
      Evaluator ev(m);
      bool engine = check_theory(ev, theta).satisfied;
      ++c.cases;
      if (engine != strict_total_order(m)) {
        c.fail("size " + std::to_string(n) + " relation " + std::to_string(bits) + ": theta says " +
               (engine ? "yes" : "no"));
        return c;
      }
    }
  }
  return c;
}

// 7. omission search: naive re-verification and determinism
Check omission_search() {
  Check c;
  std::vector<fs::path> problems;
  for (const auto& entry : fs::directory_iterator(fixtures / "search")) problems.push_back(entry.path());
  std::sort(problems.begin(), problems.end());
  if (problems.size() != 10) c.fail("expected 10 search problems, found " + std::to_string(problems.size()));
  for (const auto& dir : problems) {
    SearchSpace space = io::search_space_from_json(io::read_json(dir / "space.json"));
    Theory t = io::theory_from_json(io::read_json(dir / "theory.json"), space.vocabulary);
    auto types = io::typesets_from_json(io::read_json(dir / "types.json"), space.vocabulary);
    std::string name = dir.filename().string();
    if (space.max_size > 3 || space.truth_grid > 4) c.fail(name + " exceeds N <= 3, g <= 4");
    auto render_result = [](const SearchResult& r) {
      return r.model ? io::to_json(*r.model).dump(2) : "EXHAUSTED " + std::to_string(r.examined);
    };
    SearchResult first = search_model(space, t, types, 1);
    std::string reference = render_result(first) + "#" + std::to_string(first.examined);
    for (int workers : {1, 1, 1, 4, 4, 4}) {
      SearchResult again = search_model(space, t, types, workers);
      if (render_result(again) + "#" + std::to_string(again.examined) != reference)
        c.fail(name + ": output differs with " + std::to_string(workers) + " workers");
    }
    ++c.cases;
    if (!first.model) continue;
    const Structure& m = *first.model;
    if (!validate_metric_and_ranges(m).pass()) c.fail(name + ": found structure is not a metric structure");
    if (!naive::models(m, t)) c.fail(name + ": found structure fails the theory under the naive evaluator");
    for (const auto& type : types)
      if (!naive::omits(m, type)) c.fail(name + ": found structure realizes " + type.name);
    // round trip through the file format, as the CLI prints it
    if (!(io::structure_from_json(io::to_json(m)) == m)) c.fail(name + ": JSON round trip changes the model");
  }
  return c;
}

struct FamilyCase {
  std::string name;
  io::Family family;
  Theory theory;
};

std::vector<FamilyCase> fixture_families() {
  std::vector<FamilyCase> out;
  for (const auto& [path, theory] : {std::pair{"families/alpha.json", "families/alpha-theory.json"},
                                     std::pair{"families/beta", "families/beta-theory.json"}}) {
    io::Family f = io::load_family(fixtures / path);
    Vocabulary v = f.vocabulary();
    out.push_back({std::string(path) + " (no theory)", f, Theory{}});
    out.push_back({std::string(path), f, io::theory_from_json(io::read_json(fixtures / theory), v)});
  }
  return out;
}

bool genuine_counterexample(const FamilyCase& fc, const TypeSet& gamma, const TypeSet& sigma,
                            const EntailmentResult& r, std::string& why) {
  if (r.holds) return true;
  if (!r.counterexample) {
    why = "false entailment without a counterexample";
    return false;
  }
  const auto& ce = *r.counterexample;
  const Structure& m = fc.family.structures.at(ce.structure_index);
  naive::Env env;
  for (std::size_t i = 0; i < sigma.variables.size(); ++i) env[sigma.variables[i]] = ce.tuple.at(i);
  if (!naive::models(m, fc.theory)) why = "counterexample structure is not a model";
  else if (!naive::realizes(m, ce.tuple, gamma)) why = "counterexample tuple does not realize gamma";
  else if (ce.formula_index >= sigma.formulas.size() || !(ce.formula == sigma.formulas[ce.formula_index]))
    why = "counterexample names the wrong formula";
  else if (naive::eval(m, ce.formula, env) != ce.value) why = "counterexample value does not re-evaluate";
  else if (ce.value == Rational(1)) why = "counterexample value is 1";
  return why.empty();
}

bool genuine_generator_refutation(const FamilyCase& fc, const TypeSet& phi, const TypeSet& sigma,
                                  const GeneratorReport& r, std::string& why) {
  if (r.holds) {
    if (!r.satisfiable || !r.entailment.holds) why = "true verdict with a failing clause";
    return why.empty();
  }
  if (r.satisfiable) {
    if (!r.realization) {
      why = "satisfiable without a realization";
      return false;
    }
    const auto& [index, tuple] = *r.realization;
    if (!naive::models(fc.family.structures.at(index), fc.theory) ||
        !naive::realizes(fc.family.structures.at(index), tuple, phi)) {
      why = "realization does not re-verify";
      return false;
    }
    if (r.entailment.holds) why = "false verdict with both clauses holding";
    return why.empty() && genuine_counterexample(fc, phi, sigma, r.entailment, why);
  }
  // clause (i) fails: every structure needs its own witness
  std::set<std::size_t> covered;
  for (const auto& w : r.unsatisfiable) {
    const Structure& m = fc.family.structures.at(w.structure_index);
    covered.insert(w.structure_index);
    if (w.theory_failure) {
      const auto& tf = *w.theory_failure;
      if (naive::eval(m, fc.theory.sentences.at(tf.index)) != tf.value || tf.value == Rational(1))
        why = "theory failure does not re-evaluate";
      continue;
    }
    std::set<Tuple> tuples;
    for (const auto& t : w.tuples) {
      tuples.insert(t.tuple);
      naive::Env env;
      for (std::size_t i = 0; i < phi.variables.size(); ++i) env[phi.variables[i]] = t.tuple.at(i);
      if (naive::eval(m, phi.formulas.at(t.formula_index), env) != t.value || t.value == Rational(1))
        why = "omission witness does not re-evaluate";
    }
    if (tuples.size() != m.tuple_count(int(phi.variables.size()))) why = "omission witnesses miss a tuple";
  }
  if (covered.size() != fc.family.structures.size()) why = "unsatisfiability witnesses miss a structure";
  return why.empty();
}

// 8. every refutation carries a witness that re-evaluates
Check refutation_soundness() {
  Check c;
  std::size_t refuted = 0;
  for (const auto& fc : fixture_families()) {
    Vocabulary v = fc.family.vocabulary();
    TypeSet corpus = default_corpus(v, 1, 2);
    std::vector<TypeSet> singles;
    for (std::size_t i = 0; i < corpus.formulas.size(); i += 3)
      singles.push_back(TypeSet{"t" + std::to_string(i), corpus.variables, {corpus.formulas[i]}});
    for (const auto& gamma : singles) {
      for (const auto& sigma : singles) {
        std::string why;
        EntailmentResult e = entails(fc.family.structures, fc.theory, gamma, sigma);
        if (!genuine_counterexample(fc, gamma, sigma, e, why)) c.fail(fc.name + " entails: " + why);
        GeneratorReport g = generator_check(fc.family.structures, fc.theory, gamma, sigma);
        if (!genuine_generator_refutation(fc, gamma, sigma, g, why)) c.fail(fc.name + " generator: " + why);

        std::vector<Term> terms{Term::variable("y")};
        if (v.operation_arity("f")) terms = {Term::apply("f", {Term::variable("y")})};
        const std::string& x = corpus.variables[0];
        Formula phi = substitute(gamma.formulas[0], {{x, Term::variable("y")}});
        for (const Rational& r : {Rational(1, 2), Rational(3, 4)}) {
          OmegaCandidate cand{{"y"}, terms, phi, r};
          OmegaReport o = omega_principal_check(fc.family.structures, fc.theory, sigma, cand);
          TypeSet phi_type{"phi", {"y"}, {phi}};
          TypeSet threshold{"threshold", {"y"}, {Formula::at_least(phi, r)}};
          if (!genuine_generator_refutation(fc, phi_type, o.substituted, o.generator, why))
            c.fail(fc.name + " omega generator: " + why);
          if (!genuine_counterexample(fc, threshold, o.substituted, o.threshold, why))
            c.fail(fc.name + " omega threshold: " + why);
          if (o.holds != (o.generator.holds && o.threshold.holds)) c.fail(fc.name + " omega verdict is inconsistent");
          // the substituted type really is Sigma(t(y))
          Formula expected = substitute(sigma.formulas[0], {{x, terms[0]}});
          if (!(o.substituted.formulas.at(0) == expected)) c.fail(fc.name + " omega substitution differs");
          refuted += !o.holds;
          c.cases += 1;
        }
        refuted += !e.holds + !g.holds;
        c.cases += 2;
      }
    }
  }
  if (refuted == 0) c.fail("no false verdicts were produced, nothing was checked");
  return c;
}

std::vector<Structure> small_discrete_fixtures() {
  gen::Rng rng(31);
  Vocabulary v;
  v.add_predicate("P", 1);
  v.add_predicate("R", 2);
  v.add_constant("c");
  std::vector<Structure> out;
  for (int i = 0; i < 12; ++i) out.push_back(gen::random_structure(rng, v, 3, 2, true));
  return out;
}

// 9. realizations of Sigma stay within Sigma^delta under delta-moves
Check thickening_ball() {
  Check c;
  gen::Rng rng(99);
  std::size_t realized = 0;
  for (const auto& m : small_discrete_fixtures()) {
    Vocabulary v = m.vocabulary();
    Evaluator ev(m);
    for (int n : {1, 2}) {
      TypeSet corpus = default_corpus(v, n, 2);
      for (int trial = 0; trial < 6; ++trial) {
        TypeSet sigma{"sigma", corpus.variables, {}};
        int size = gen::uniform(rng, 1, 3);
        for (int k = 0; k < size; ++k)
          sigma.formulas.push_back(corpus.formulas[gen::uniform(rng, 0, int(corpus.formulas.size()) - 1)]);
        for (const Rational& delta : {Rational(0), Rational(1, 3), Rational(1, 2), Rational(1)}) {
          TypeSet thick = thicken(sigma, delta);
          for_each_tuple(m.size(), n, [&](const Tuple& a) {
            if (!realizes(ev, a, sigma)) return;
            ++realized;
            for_each_tuple(m.size(), n, [&](const Tuple& b) {
              Rational far(0);
              for (int k = 0; k < n; ++k) far = max(far, m.distance(a[k], b[k]));
              if (far > delta) return;
              ++c.cases;
              if (!realizes(ev, b, thick) || !naive::realizes(m, b, thick))
                c.fail("delta " + show(delta) + ": " + render(sigma.formulas[0]) + " not thickened");
            });
          });
        }
      }
    }
  }
  if (realized == 0) c.fail("no realized types, nothing was checked");
  return c;
}

// 10. pseudometric axioms of type_distance
Check type_distance_axioms() {
  Check c;
  std::vector<FamilyCase> families = fixture_families();
  gen::Rng rng(1010);
  Vocabulary v;
  v.add_predicate("P", 1);
  v.add_predicate("R", 2);
  for (int i = 0; i < 3; ++i) {
    io::Family f;
    for (int k = 0; k < 3; ++k) {
      f.names.push_back("s" + std::to_string(k));
      f.structures.push_back(gen::random_structure(rng, v, 3, 2));
    }
    families.push_back({"random " + std::to_string(i), f, Theory{}});
  }
  for (const auto& fc : families) {
    TypeSet corpus = default_corpus(fc.family.vocabulary(), 1, 2);
    std::vector<TypeRecord> records;
    for (std::size_t s = 0; s < fc.family.structures.size(); ++s)
      for (Element e = 0; e < fc.family.structures[s].size(); ++e) records.push_back({s, {e}});
    std::size_t n = records.size();
    std::vector<Rational> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = type_distance(fc.family.structures, fc.theory, records[i], records[j], corpus).distance;
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i * n + i] != Rational(0)) c.fail(fc.name + ": d(p,p) != 0");
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i * n + j] != d[j * n + i]) c.fail(fc.name + ": not symmetric");
        if (!d[i * n + j].in_unit_interval()) c.fail(fc.name + ": value outside [0,1]");
        for (std::size_t k = 0; k < n; ++k) {
          ++c.cases;
          if (d[i * n + k] > d[i * n + j] + d[j * n + k]) c.fail(fc.name + ": triangle inequality fails");
        }
      }
    }
  }
  return c;
}

} // namespace

int main() {
  struct Criterion {
    const char* label;
    std::function<Check()> run;
  };
  std::vector<Criterion> criteria{
      {"exact evaluation matches the naive oracle", exact_evaluation},
      {"Lukasiewicz algebra laws", algebra_laws},
      {"half-scaling approximation", half_scaling},
      {"connective homomorphism", connective_homomorphism},
      {"relativization correctness", relativization},
      {"discrete linear ordering", discrete_ordering},
      {"omission search soundness and determinism", omission_search},
      {"refutation witnesses", refutation_soundness},
      {"thickening ball property", thickening_ball},
      {"type distance pseudometric", type_distance_axioms},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Check c;
    try {
      c = criteria[i].run();
    } catch (const std::exception& e) {
      c.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line << (c.ok() ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].label << " (" << c.cases << " cases, "
         << std::fixed << std::setprecision(2) << secs << "s)";
    if (!c.ok()) line << ": " << c.failure;
    std::cout << line.str() << std::endl;
    failed += !c.ok();
  }
  return failed == 0 ? 0 : 1;
}
