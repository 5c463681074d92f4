#include "pavelka/types.hpp"

#include <algorithm>
#include <set>

#include "pavelka/error.hpp"
#include "pavelka/transforms.hpp"

namespace pavelka {

bool realizes(Evaluator& evaluator, std::span<const Element> tuple, const TypeSet& type) {
  if (tuple.size() != type.variables.size()) {
    throw Error(ErrorKind::InvalidArgument, "tuple of length " + std::to_string(tuple.size()) + " for a type in " +
                                                std::to_string(type.variables.size()) + " variables");
  }
  const Rational one(1);
  for (const Formula& f : type.formulas) {
    if (evaluator.eval(f, type.variables, tuple) != one) return false;
  }
  return true;
}

bool realizes(const Structure& m, std::span<const Element> tuple, const TypeSet& type) {
  Evaluator ev(m);
  return realizes(ev, tuple, type);
}

OmissionReport omits(Evaluator& evaluator, const TypeSet& type) {
  type.check();
  OmissionReport report;
  const Rational one(1);
  const int n = static_cast<int>(type.variables.size());
  for_each_tuple(evaluator.structure().size(), n, [&](const Tuple& t) {
    if (!report.omitted) return;
    for (std::size_t i = 0; i < type.formulas.size(); ++i) {
      Rational v = evaluator.eval(type.formulas[i], type.variables, t);
      if (v != one) {
        report.witnesses.push_back({t, i, v});
        return;
      }
    }
    report.omitted = false;
    report.realizer = t;
  });
  return report;
}

OmissionReport omits(const Structure& m, const TypeSet& type) {
  Evaluator ev(m);
  return omits(ev, type);
}

GeneratorReport generator_check(std::span<const Structure> family, const Theory& theory, const TypeSet& phi,
                                const TypeSet& sigma) {
  if (phi.variables != sigma.variables) {
    throw Error(ErrorKind::InvalidArgument, "generator and type use different variable tuples");
  }
  phi.check();
  sigma.check();
  GeneratorReport report;
  for (std::size_t k = 0; k < family.size() && !report.satisfiable; ++k) {
    Evaluator ev(family[k]);
    UnsatWitness why{k, std::nullopt, {}};
    TheoryReport th = check_theory(ev, theory);
    if (!th.satisfied) {
      why.theory_failure = th.failing.front();
      report.unsatisfiable.push_back(std::move(why));
      continue;
    }
    OmissionReport om = omits(ev, phi);
    if (om.omitted) {
      why.tuples = std::move(om.witnesses);
      report.unsatisfiable.push_back(std::move(why));
    } else {
      report.satisfiable = true;
      report.realization = std::make_pair(k, *om.realizer);
    }
  }
  if (report.satisfiable) report.unsatisfiable.clear();
  report.entailment = entails(family, theory, phi, sigma);
  report.holds = report.satisfiable && report.entailment.holds;
  return report;
}

namespace {

void check_candidate_terms(const std::vector<std::string>& variables, const std::vector<Term>& terms) {
  std::set<std::string> allowed(variables.begin(), variables.end());
  if (allowed.size() != variables.size()) throw Error(ErrorKind::InvalidArgument, "repeated candidate variable");
  for (const Term& t : terms) {
    for (const auto& v : free_variables(t)) {
      if (!allowed.count(v)) {
        throw Error(ErrorKind::InvalidArgument, "term " + render(t) + " uses '" + v + "', not a candidate variable");
      }
    }
  }
}

} // namespace

OmegaReport omega_principal_check(std::span<const Structure> family, const Theory& theory, const TypeSet& sigma,
                                  const OmegaCandidate& candidate) {
  sigma.check();
  if (candidate.terms.size() != sigma.variables.size()) {
    throw Error(ErrorKind::InvalidArgument, "candidate supplies " + std::to_string(candidate.terms.size()) +
                                                " terms for a type in " + std::to_string(sigma.variables.size()) +
                                                " variables");
  }
  if (candidate.variables.empty()) throw Error(ErrorKind::InvalidArgument, "candidate needs at least one variable");
  check_candidate_terms(candidate.variables, candidate.terms);
  if (candidate.r.sign() <= 0 || candidate.r >= Rational(1)) {
    throw Error(ErrorKind::InvalidArgument, "threshold r must lie in (0,1)");
  }

  std::map<std::string, Term> replacement;
  for (std::size_t i = 0; i < sigma.variables.size(); ++i) replacement.emplace(sigma.variables[i], candidate.terms[i]);

  OmegaReport report;
  report.substituted.name = sigma.name + "[t]";
  report.substituted.variables = candidate.variables;
  for (const Formula& f : sigma.formulas) report.substituted.formulas.push_back(substitute(f, replacement));

  TypeSet phi{"phi", candidate.variables, {candidate.formula}};
  TypeSet threshold{"phi>=r", candidate.variables, {Formula::at_least(candidate.formula, candidate.r)}};
  report.generator = generator_check(family, theory, phi, report.substituted);
  report.threshold = entails(family, theory, threshold, report.substituted);
  report.holds = report.generator.holds && report.threshold.holds;
  return report;
}

TypeSet term_substitution_generator(const std::vector<std::string>& x, const std::vector<std::string>& y,
                                    const std::vector<Term>& terms, const TypeSet& phi) {
  if (terms.size() != x.size()) throw Error(ErrorKind::InvalidArgument, "one term per variable required");
  if (phi.variables != y) throw Error(ErrorKind::InvalidArgument, "Phi must be over the candidate variables");
  check_candidate_terms(y, terms);

  // Rename y away from x so the new quantifiers cannot capture x.
  std::set<std::string> taken(x.begin(), x.end());
  for (const auto& f : phi.formulas) {
    for (const auto& v : all_variables(f)) taken.insert(v);
    for (const auto& s : symbols_of(f)) taken.insert(s);
  }
  for (const auto& t : terms) {
    for (const auto& v : free_variables(t)) taken.insert(v);
  }
  std::vector<std::string> fresh;
  std::map<std::string, Term> rename;
  std::set<std::string> xs(x.begin(), x.end());
  for (const auto& v : y) {
    std::string w = xs.count(v) ? fresh_variable(v, taken) : v;
    taken.insert(w);
    fresh.push_back(w);
    rename.emplace(v, Term::variable(w));
  }

  std::vector<Formula> parts;
  for (std::size_t k = 0; k < x.size(); ++k) {
    parts.push_back(Formula::at_most(Formula::metric(Term::variable(x[k]), substitute(terms[k], rename)), Rational(0)));
  }
  std::vector<Formula> body;
  for (const auto& f : phi.formulas) body.push_back(substitute(f, rename));
  parts.push_back(conjunction_of(body));
  Formula psi = conjunction_of(parts);
  for (std::size_t k = fresh.size(); k-- > 0;) psi = Formula::exists(fresh[k], psi);
  return TypeSet{"Psi", x, {psi}};
}

TypeSet default_corpus(const Vocabulary& vocabulary, int n, int grid) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "corpus needs at least one variable");
  if (grid < 1) throw Error(ErrorKind::InvalidArgument, "corpus grid must be positive");
  TypeSet out;
  out.name = "corpus";
  std::set<std::string> taken;
  for (const auto& [name, a] : vocabulary.predicates()) taken.insert(name);
  for (const auto& [name, a] : vocabulary.operations()) taken.insert(name);
  for (int i = 1; i <= n; ++i) {
    std::string v = fresh_variable("x" + std::to_string(i), taken);
    taken.insert(v);
    out.variables.push_back(v);
  }
  std::vector<Term> base;
  for (const auto& v : out.variables) base.push_back(Term::variable(v));
  for (const auto& c : vocabulary.constants()) base.push_back(Term::apply(c));
  std::vector<Term> terms = base;
  for (const auto& [name, arity] : vocabulary.operations()) {
    if (arity == 0) continue;
    for_each_tuple(base.size(), arity, [&](const Tuple& t) {
      std::vector<Term> args;
      for (Element e : t) args.push_back(base[e]);
      terms.push_back(Term::apply(name, args));
    });
  }
  std::vector<Formula> atoms;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) atoms.push_back(Formula::metric(terms[i], terms[j]));
  }
  for (const auto& [name, arity] : vocabulary.predicates()) {
    for_each_tuple(terms.size(), arity, [&](const Tuple& t) {
      std::vector<Term> args;
      for (Element e : t) args.push_back(terms[e]);
      atoms.push_back(Formula::predicate(name, args));
    });
  }
  for (const auto& a : atoms) {
    out.formulas.push_back(a);
    for (int k = 0; k <= grid; ++k) {
      out.formulas.push_back(Formula::at_most(a, Rational(k, grid)));
      out.formulas.push_back(Formula::at_least(a, Rational(k, grid)));
    }
  }
  return out;
}

TypeDistance type_distance(std::span<const Structure> family, const Theory& theory, const TypeRecord& p,
                           const TypeRecord& q, const TypeSet& corpus) {
  if (family.empty()) throw Error(ErrorKind::InvalidArgument, "type distance needs a nonempty family");
  if (p.tuple.size() != q.tuple.size()) throw Error(ErrorKind::InvalidArgument, "records have different lengths");
  if (corpus.variables.size() != p.tuple.size()) {
    throw Error(ErrorKind::InvalidArgument, "corpus variables do not match the record length");
  }
  for (const TypeRecord* r : {&p, &q}) {
    if (r->structure_index >= family.size()) throw Error(ErrorKind::InvalidArgument, "record structure out of range");
    for (Element e : r->tuple) {
      if (e >= family[r->structure_index].size()) throw Error(ErrorKind::InvalidArgument, "record element out of range");
    }
  }
  const int n = static_cast<int>(p.tuple.size());

  std::vector<std::unique_ptr<Evaluator>> evs;
  for (const auto& m : family) evs.push_back(std::make_unique<Evaluator>(m));
  auto signature = [&](std::size_t k, const Tuple& t) {
    std::vector<Rational> sig;
    sig.reserve(corpus.formulas.size());
    for (const auto& f : corpus.formulas) sig.push_back(evs[k]->eval(f, corpus.variables, t));
    return sig;
  };

  std::map<std::vector<Rational>, std::size_t> classes;
  auto class_of = [&](std::vector<Rational> sig) {
    auto [it, inserted] = classes.emplace(std::move(sig), classes.size());
    return it->second;
  };
  struct Realized {
    Tuple tuple;
    std::size_t cls;
  };
  std::vector<std::pair<std::size_t, std::vector<Realized>>> per_model;
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (!check_theory(*evs[k], theory).satisfied) continue;
    std::vector<Realized> list;
    for_each_tuple(family[k].size(), n, [&](const Tuple& t) { list.push_back({t, class_of(signature(k, t))}); });
    per_model.emplace_back(k, std::move(list));
  }
  const std::size_t cp = class_of(signature(p.structure_index, p.tuple));
  const std::size_t cq = class_of(signature(q.structure_index, q.tuple));

  const std::size_t K = classes.size();
  std::vector<std::vector<Rational>> raw(K, std::vector<Rational>(K, Rational(1)));
  std::vector<std::vector<bool>> common(K, std::vector<bool>(K, false));
  for (std::size_t i = 0; i < K; ++i) raw[i][i] = Rational(0);
  for (const auto& [k, list] : per_model) {
    const Structure& m = family[k];
    for (const auto& a : list) {
      for (const auto& b : list) {
        Rational d(0);
        for (int i = 0; i < n; ++i) d = max(d, m.distance(a.tuple[static_cast<std::size_t>(i)], b.tuple[static_cast<std::size_t>(i)]));
        common[a.cls][b.cls] = true;
        if (d < raw[a.cls][b.cls]) raw[a.cls][b.cls] = d;
      }
    }
  }
  auto closure = raw;
  for (std::size_t via = 0; via < K; ++via) {
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = 0; j < K; ++j) {
        Rational through = min(Rational(1), closure[i][via] + closure[via][j]);
        if (through < closure[i][j]) closure[i][j] = through;
      }
    }
  }
  return {closure[cp][cq], raw[cp][cq], cp == cq || common[cp][cq]};
}

MetricPrincipalReport metrically_principal_check(std::span<const Structure> family, const Theory& theory,
                                                 const TypeSet& sigma, std::span<const Rational> deltas,
                                                 const std::map<Rational, PrincipalCandidate>& candidates) {
  MetricPrincipalReport report;
  for (const Rational& delta : deltas) {
    auto it = candidates.find(delta);
    if (it == candidates.end()) {
      throw Error(ErrorKind::InvalidArgument, "no candidate supplied for delta " + delta.str());
    }
    DeltaVerdict v;
    v.delta = delta;
    v.thickened = thicken(sigma, delta);
    if (const auto* g = std::get_if<GeneratorCandidate>(&it->second)) {
      v.generator = generator_check(family, theory, g->phi, v.thickened);
      v.holds = v.generator->holds;
    } else {
      v.omega = omega_principal_check(family, theory, v.thickened, std::get<OmegaCandidate>(it->second));
      v.holds = v.omega->holds;
    }
    report.holds = report.holds && v.holds;
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

} // namespace pavelka
