#include "pavelka/connectives.hpp"

#include <map>
#include <set>
#include <unordered_map>

#include "pavelka/error.hpp"

namespace pavelka {

struct ConnectiveNode {
  ConnectiveTerm::Kind kind;
  int arity = 0;
  int index = 0;
  Rational value;
  std::vector<ConnectiveTerm> children;
};

ConnectiveTerm ConnectiveTerm::proj(int index, int arity) {
  if (arity < 1 || index < 1 || index > arity) {
    throw Error(ErrorKind::ArityMismatch,
                "projection " + std::to_string(index) + " out of range for arity " + std::to_string(arity));
  }
  auto n = std::make_shared<ConnectiveNode>();
  n->kind = Kind::Proj;
  n->arity = arity;
  n->index = index;
  return ConnectiveTerm(std::move(n));
}

ConnectiveTerm ConnectiveTerm::constant(Rational value, int arity) {
  if (!value.in_unit_interval()) throw Error(ErrorKind::ConstantRange, "constant " + value.str() + " outside [0,1]");
  if (arity < 0) throw Error(ErrorKind::ArityMismatch, "negative arity");
  auto n = std::make_shared<ConnectiveNode>();
  n->kind = Kind::Const;
  n->arity = arity;
  n->value = std::move(value);
  return ConnectiveTerm(std::move(n));
}

ConnectiveTerm ConnectiveTerm::implies(ConnectiveTerm lhs, ConnectiveTerm rhs) {
  if (lhs.arity() != rhs.arity()) {
    throw Error(ErrorKind::ArityMismatch, "implication between terms of arity " + std::to_string(lhs.arity()) +
                                              " and " + std::to_string(rhs.arity()));
  }
  auto n = std::make_shared<ConnectiveNode>();
  n->kind = Kind::Implies;
  n->arity = lhs.arity();
  n->children = {std::move(lhs), std::move(rhs)};
  return ConnectiveTerm(std::move(n));
}

ConnectiveTerm ConnectiveTerm::negation(ConnectiveTerm t) {
  int arity = t.arity();
  return implies(std::move(t), constant(Rational(0), arity));
}

ConnectiveTerm ConnectiveTerm::disjunction(ConnectiveTerm a, ConnectiveTerm b) {
  return implies(implies(std::move(a), b), b);
}

ConnectiveTerm ConnectiveTerm::conjunction(ConnectiveTerm a, ConnectiveTerm b) {
  return negation(disjunction(negation(std::move(a)), negation(std::move(b))));
}

ConnectiveTerm ConnectiveTerm::oplus(ConnectiveTerm a, ConnectiveTerm b) {
  return implies(negation(std::move(a)), std::move(b));
}

ConnectiveTerm ConnectiveTerm::odot(ConnectiveTerm a, ConnectiveTerm b) {
  return negation(oplus(negation(std::move(a)), negation(std::move(b))));
}

ConnectiveTerm::Kind ConnectiveTerm::kind() const { return node_->kind; }
int ConnectiveTerm::arity() const { return node_->arity; }
int ConnectiveTerm::index() const { return node_->index; }
const Rational& ConnectiveTerm::value() const { return node_->value; }
const ConnectiveTerm& ConnectiveTerm::lhs() const { return node_->children.at(0); }
const ConnectiveTerm& ConnectiveTerm::rhs() const { return node_->children.at(1); }

namespace {

void collect(const ConnectiveTerm& t, std::set<const ConnectiveNode*>& seen) {
  if (!seen.insert(t.node()).second) return;
  if (t.kind() == ConnectiveTerm::Kind::Implies) {
    collect(t.lhs(), seen);
    collect(t.rhs(), seen);
  }
}

bool equal(const ConnectiveTerm& a, const ConnectiveTerm& b,
           std::set<std::pair<const ConnectiveNode*, const ConnectiveNode*>>& same) {
  if (a.node() == b.node()) return true;
  if (same.count({a.node(), b.node()})) return true;
  if (a.kind() != b.kind() || a.arity() != b.arity()) return false;
  bool eq = false;
  switch (a.kind()) {
  case ConnectiveTerm::Kind::Proj: eq = a.index() == b.index(); break;
  case ConnectiveTerm::Kind::Const: eq = a.value() == b.value(); break;
  case ConnectiveTerm::Kind::Implies: eq = equal(a.lhs(), b.lhs(), same) && equal(a.rhs(), b.rhs(), same); break;
  }
  if (eq) same.insert({a.node(), b.node()});
  return eq;
}

} // namespace

std::size_t ConnectiveTerm::dag_size() const {
  std::set<const ConnectiveNode*> seen;
  collect(*this, seen);
  return seen.size();
}

bool operator==(const ConnectiveTerm& a, const ConnectiveTerm& b) {
  std::set<std::pair<const ConnectiveNode*, const ConnectiveNode*>> same;
  return equal(a, b, same);
}

CompiledTerm::CompiledTerm(const ConnectiveTerm& t) : arity_(t.arity()) {
  std::unordered_map<const ConnectiveNode*, std::size_t> slot;
  // Iterative post-order so deep compositions cannot overflow the stack.
  std::vector<std::pair<ConnectiveTerm, bool>> stack{{t, false}};
  while (!stack.empty()) {
    auto [term, expanded] = stack.back();
    stack.pop_back();
    if (slot.count(term.node())) continue;
    if (term.kind() == ConnectiveTerm::Kind::Implies && !expanded) {
      stack.push_back({term, true});
      stack.push_back({term.rhs(), false});
      stack.push_back({term.lhs(), false});
      continue;
    }
    Step s{term.kind(), term.index(), term.value(), 0, 0};
    if (term.kind() == ConnectiveTerm::Kind::Implies) {
      s.lhs = slot.at(term.lhs().node());
      s.rhs = slot.at(term.rhs().node());
    }
    slot[term.node()] = steps_.size();
    steps_.push_back(std::move(s));
  }
}

Rational CompiledTerm::operator()(std::span<const Rational> point) const {
  if (static_cast<int>(point.size()) != arity_) {
    throw Error(ErrorKind::ArityMismatch, "point of length " + std::to_string(point.size()) +
                                              " for a term of arity " + std::to_string(arity_));
  }
  std::vector<Rational> values(steps_.size());
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const Step& s = steps_[i];
    switch (s.kind) {
    case ConnectiveTerm::Kind::Proj: values[i] = point[static_cast<std::size_t>(s.index - 1)]; break;
    case ConnectiveTerm::Kind::Const: values[i] = s.value; break;
    case ConnectiveTerm::Kind::Implies: values[i] = lukasiewicz_implies(values[s.lhs], values[s.rhs]); break;
    }
  }
  return values.back();
}

Rational eval_term(const ConnectiveTerm& t, std::span<const Rational> point) {
  for (const Rational& x : point) {
    if (!x.in_unit_interval()) throw Error(ErrorKind::InvalidArgument, "point coordinate " + x.str() + " outside [0,1]");
  }
  return CompiledTerm(t)(point);
}

namespace {

ConnectiveTerm compose_rec(const ConnectiveTerm& t, std::span<const ConnectiveTerm> args, int arity,
                           std::unordered_map<const ConnectiveNode*, ConnectiveTerm>& memo) {
  if (auto it = memo.find(t.node()); it != memo.end()) return it->second;
  ConnectiveTerm out = [&] {
    switch (t.kind()) {
    case ConnectiveTerm::Kind::Proj: return args[static_cast<std::size_t>(t.index() - 1)];
    case ConnectiveTerm::Kind::Const: return ConnectiveTerm::constant(t.value(), arity);
    case ConnectiveTerm::Kind::Implies: break;
    }
    return ConnectiveTerm::implies(compose_rec(t.lhs(), args, arity, memo), compose_rec(t.rhs(), args, arity, memo));
  }();
  memo.emplace(t.node(), out);
  return out;
}

} // namespace

ConnectiveTerm compose(const ConnectiveTerm& outer, std::span<const ConnectiveTerm> args) {
  if (static_cast<int>(args.size()) != outer.arity()) {
    throw Error(ErrorKind::ArityMismatch, "compose: expected " + std::to_string(outer.arity()) + " arguments");
  }
  if (args.empty()) return outer;
  int arity = args[0].arity();
  for (const auto& a : args) {
    if (a.arity() != arity) throw Error(ErrorKind::ArityMismatch, "compose: arguments differ in arity");
  }
  std::unordered_map<const ConnectiveNode*, ConnectiveTerm> memo;
  return compose_rec(outer, args, arity, memo);
}

namespace {

Rational lipschitz_rec(const ConnectiveTerm& t, std::unordered_map<const ConnectiveNode*, Rational>& memo) {
  if (auto it = memo.find(t.node()); it != memo.end()) return it->second;
  Rational out;
  switch (t.kind()) {
  case ConnectiveTerm::Kind::Proj: out = Rational(1); break;
  case ConnectiveTerm::Kind::Const: out = Rational(0); break;
  case ConnectiveTerm::Kind::Implies: {
    const ConnectiveTerm& a = t.lhs();
    const ConnectiveTerm& b = t.rhs();
    if (b.kind() == ConnectiveTerm::Kind::Const) {
      // 1 - a + r clamped: same bound as a
      out = lipschitz_rec(a, memo);
    } else if (a.kind() == ConnectiveTerm::Kind::Implies && a.rhs() == b) {
      out = max(lipschitz_rec(a.lhs(), memo), lipschitz_rec(b, memo));
    } else {
      out = lipschitz_rec(a, memo) + lipschitz_rec(b, memo);
    }
    break;
  }
  }
  memo.emplace(t.node(), out);
  return out;
}

} // namespace

Rational lipschitz_bound(const ConnectiveTerm& t) {
  std::unordered_map<const ConnectiveNode*, Rational> memo;
  return lipschitz_rec(t, memo);
}

std::vector<Rational> grid_points(const Rational& h) {
  if (h.sign() <= 0 || h > Rational(1)) throw Error(ErrorKind::InvalidArgument, "grid spacing must lie in (0,1]");
  std::vector<Rational> out;
  for (Rational x(0); x < Rational(1); x += h) out.push_back(x);
  out.push_back(Rational(1));
  return out;
}

Rational grid_error(const ConnectiveTerm& t, const Oracle& oracle, const Rational& h) {
  if (t.arity() != oracle.arity) {
    throw Error(ErrorKind::ArityMismatch, "term has arity " + std::to_string(t.arity()) + " but the target has arity " +
                                              std::to_string(oracle.arity));
  }
  const auto axis = grid_points(h);
  CompiledTerm compiled(t);
  const int n = t.arity();
  std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
  std::vector<Rational> point(static_cast<std::size_t>(n), Rational(0));
  Rational worst(0);
  while (true) {
    for (int i = 0; i < n; ++i) point[static_cast<std::size_t>(i)] = axis[digit[static_cast<std::size_t>(i)]];
    worst = max(worst, abs(compiled(point) - oracle.fn(point)));
    int i = n - 1;
    while (i >= 0 && digit[static_cast<std::size_t>(i)] + 1 == axis.size()) digit[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
    ++digit[static_cast<std::size_t>(i)];
  }
  return worst;
}

Rational certify(const ConnectiveTerm& t, const Oracle& oracle, const Rational& h, const Rational& target_lipschitz) {
  if (target_lipschitz.sign() < 0) throw Error(ErrorKind::InvalidArgument, "Lipschitz bound must be non-negative");
  Rational grid = grid_error(t, oracle, h);
  return grid + (target_lipschitz + lipschitz_bound(t)) * h / Rational(2);
}

ConnectiveTerm half_approx(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "half_approx needs n >= 1");
  const ConnectiveTerm x = ConnectiveTerm::proj(1, 1);
  std::optional<ConnectiveTerm> acc;
  for (int i = 1; i <= n; ++i) {
    ConnectiveTerm c = ConnectiveTerm::constant(Rational(i, n), 1);
    ConnectiveTerm piece = ConnectiveTerm::conjunction(c, ConnectiveTerm::negation(ConnectiveTerm::implies(x, c)));
    acc = acc ? ConnectiveTerm::disjunction(*acc, piece) : piece;
  }
  return *acc;
}

namespace {

// Truncated sum and product with the trivial cases folded away.
ConnectiveTerm plus(const ConnectiveTerm& a, const ConnectiveTerm& b) {
  if (a.is_constant(Rational(0))) return b;
  if (b.is_constant(Rational(0))) return a;
  if (a.is_constant(Rational(1)) || b.is_constant(Rational(1))) return ConnectiveTerm::constant(Rational(1), a.arity());
  return ConnectiveTerm::oplus(a, b);
}

ConnectiveTerm times(const ConnectiveTerm& a, const ConnectiveTerm& b) {
  if (a.is_constant(Rational(1))) return b;
  if (b.is_constant(Rational(1))) return a;
  if (a.is_constant(Rational(0)) || b.is_constant(Rational(0))) return ConnectiveTerm::constant(Rational(0), a.arity());
  return ConnectiveTerm::odot(a, b);
}

Rational power_of_two(int k) {
  Rational r(1);
  for (int i = 0; i < k; ++i) r = r * Rational(2);
  return r;
}

// Splits a non-negative dyadic rational into p / 2^k with p odd or zero.
std::pair<std::int64_t, int> dyadic_parts(const Rational& r) {
  mpz_class den = r.denominator();
  int k = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++k;
  }
  if (den != 1) throw Error(ErrorKind::InvalidArgument, "coefficient " + r.str() + " is not dyadic");
  mpz_class num = r.numerator();
  if (!num.fits_slong_p()) throw Error(ErrorKind::InvalidArgument, "coefficient " + r.str() + " is too large");
  return {num.get_si(), k};
}

} // namespace

Approximation scale_dyadic(std::int64_t p, int k, int n) {
  if (p < 0 || k < 0) throw Error(ErrorKind::InvalidArgument, "scale_dyadic needs p >= 0 and k >= 0");
  if (k > 62) throw Error(ErrorKind::InvalidArgument, "scale_dyadic supports k <= 62");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "scale_dyadic needs n >= 1");
  const ConnectiveTerm x = ConnectiveTerm::proj(1, 1);
  if (p == 0) return {ConnectiveTerm::constant(Rational(0), 1), Rational(0), true};

  const ConnectiveTerm half = half_approx(n);
  std::vector<ConnectiveTerm> halves{x}; // halves[j] ~ x / 2^j
  std::vector<ConnectiveTerm> doubles{x}; // doubles[j] = clamp01(2^j x)
  ConnectiveTerm sum = ConnectiveTerm::constant(Rational(0), 1);
  bool exact = true;
  for (int bit = 0; bit < 63; ++bit) {
    if (!((p >> bit) & 1)) continue;
    ConnectiveTerm part = x;
    if (bit < k) {
      exact = false;
      const auto depth = static_cast<std::size_t>(k - bit);
      while (halves.size() <= depth) {
        ConnectiveTerm prev = halves.back();
        halves.push_back(compose(half, std::span<const ConnectiveTerm>(&prev, 1)));
      }
      part = halves[depth];
    } else {
      const auto depth = static_cast<std::size_t>(bit - k);
      while (doubles.size() <= depth) doubles.push_back(plus(doubles.back(), doubles.back()));
      part = doubles[depth];
    }
    sum = plus(sum, part);
  }
  if (exact) return {sum, Rational(0), true};

  const Rational scale = Rational(p) / power_of_two(k);
  Oracle target{1, [scale](std::span<const Rational> pt) { return clamp01(scale * pt[0]); }};
  const Rational h(1, 8 * static_cast<std::int64_t>(n));
  return {sum, certify(sum, target, h, scale), false};
}

void PLSpec::check() const {
  if (arity < 1) throw Error(ErrorKind::InvalidArgument, "PL target arity must be at least 1");
  if (groups.empty()) throw Error(ErrorKind::InvalidArgument, "PL target has no groups");
  for (const auto& g : groups) {
    if (g.empty()) throw Error(ErrorKind::InvalidArgument, "PL target has an empty group");
    for (const auto& piece : g) {
      if (static_cast<int>(piece.coefficients.size()) != arity) {
        throw Error(ErrorKind::ArityMismatch, "PL piece has " + std::to_string(piece.coefficients.size()) +
                                                  " coefficients, expected " + std::to_string(arity));
      }
    }
  }
}

Rational PLSpec::eval(std::span<const Rational> point) const {
  std::optional<Rational> best;
  for (const auto& g : groups) {
    std::optional<Rational> low;
    for (const auto& piece : g) {
      Rational v = piece.intercept;
      for (std::size_t i = 0; i < piece.coefficients.size(); ++i) v += piece.coefficients[i] * point[i];
      v = clamp01(v);
      low = low ? min(*low, v) : v;
    }
    best = best ? max(*best, *low) : *low;
  }
  return *best;
}

Rational PLSpec::lipschitz_constant() const {
  Rational out(0);
  for (const auto& g : groups) {
    for (const auto& piece : g) {
      Rational s(0);
      for (const auto& c : piece.coefficients) s += abs(c);
      out = max(out, s);
    }
  }
  return out;
}

namespace {

struct PieceBuilder {
  std::vector<ConnectiveTerm> units; // each in [0,1]
  int arity;
  std::map<std::pair<std::size_t, Rational>, ConnectiveTerm> memo;

  // clamp01(units[j] + ... + units[m-1] + t)
  ConnectiveTerm clamp_sum(std::size_t j, const Rational& t) {
    const Rational remaining(static_cast<std::int64_t>(units.size() - j));
    if (t + remaining <= Rational(0)) return ConnectiveTerm::constant(Rational(0), arity);
    if (t >= Rational(1)) return ConnectiveTerm::constant(Rational(1), arity);
    if (j == units.size()) return ConnectiveTerm::constant(clamp01(t), arity);
    auto key = std::make_pair(j, t);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    // clamp01(u + V) = (u (+) clamp01(V)) (.) clamp01(V + 1) for u in [0,1]
    ConnectiveTerm out = times(plus(units[j], clamp_sum(j + 1, t)), clamp_sum(j + 1, t + Rational(1)));
    memo.emplace(key, out);
    return out;
  }
};

} // namespace

Approximation approx_lattice(const PLSpec& spec, int n) {
  spec.check();
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "approx_lattice needs n >= 1");
  bool exact = true;
  std::map<std::pair<std::int64_t, int>, Approximation> scaled;
  auto scaler = [&](std::int64_t p, int k) {
    auto key = std::make_pair(p, k);
    auto it = scaled.find(key);
    if (it == scaled.end()) it = scaled.emplace(key, scale_dyadic(p, k, n)).first;
    if (!it->second.exact) exact = false;
    return it->second.term;
  };

  std::optional<ConnectiveTerm> result;
  for (const auto& group : spec.groups) {
    std::optional<ConnectiveTerm> low;
    for (const auto& piece : group) {
      PieceBuilder b;
      b.arity = spec.arity;
      Rational t = piece.intercept;
      for (int i = 0; i < spec.arity; ++i) {
        const Rational& c = piece.coefficients[static_cast<std::size_t>(i)];
        if (c.sign() == 0) continue;
        dyadic_parts(abs(c)); // rejects non-dyadic input early
        ConnectiveTerm y = ConnectiveTerm::proj(i + 1, spec.arity);
        if (c.sign() < 0) {
          y = ConnectiveTerm::negation(y);
          t -= abs(c);
        }
        Rational a = abs(c);
        mpz_class whole = a.numerator() / a.denominator();
        for (mpz_class q = 0; q < whole; ++q) b.units.push_back(y);
        Rational frac = a - Rational(mpq_class(whole));
        if (frac.sign() > 0) {
          auto [p, k] = dyadic_parts(frac);
          ConnectiveTerm s = scaler(p, k);
          b.units.push_back(compose(s, std::span<const ConnectiveTerm>(&y, 1)));
        }
      }
      ConnectiveTerm term = b.clamp_sum(0, t);
      low = low ? ConnectiveTerm::conjunction(*low, term) : term;
    }
    result = result ? ConnectiveTerm::disjunction(*result, *low) : *low;
  }
  if (exact) return {*result, Rational(0), true};
  Oracle target{spec.arity, [&spec](std::span<const Rational> pt) { return spec.eval(pt); }};
  const Rational h(1, 8 * static_cast<std::int64_t>(n));
  return {*result, certify(*result, target, h, spec.lipschitz_constant()), false};
}

namespace {

Formula apply_rec(const ConnectiveTerm& t, std::span<const Formula> formulas,
                  std::unordered_map<const ConnectiveNode*, Formula>& memo) {
  if (auto it = memo.find(t.node()); it != memo.end()) return it->second;
  Formula out = [&] {
    switch (t.kind()) {
    case ConnectiveTerm::Kind::Proj: return formulas[static_cast<std::size_t>(t.index() - 1)];
    case ConnectiveTerm::Kind::Const: return Formula::constant(t.value());
    case ConnectiveTerm::Kind::Implies: break;
    }
    return Formula::implies(apply_rec(t.lhs(), formulas, memo), apply_rec(t.rhs(), formulas, memo));
  }();
  memo.emplace(t.node(), out);
  return out;
}

} // namespace

Formula apply_connective(const ConnectiveTerm& t, std::span<const Formula> formulas) {
  if (static_cast<int>(formulas.size()) != t.arity()) {
    throw Error(ErrorKind::ArityMismatch, "connective of arity " + std::to_string(t.arity()) + " applied to " +
                                              std::to_string(formulas.size()) + " formulas");
  }
  std::unordered_map<const ConnectiveNode*, Formula> memo;
  return apply_rec(t, formulas, memo);
}

std::string projection_name(int index) { return "x" + std::to_string(index); }

Vocabulary projection_vocabulary(int arity) {
  Vocabulary v;
  for (int i = 1; i <= arity; ++i) v.add_predicate(projection_name(i), 0);
  return v;
}

Formula to_formula(const ConnectiveTerm& t) {
  std::vector<Formula> atoms;
  for (int i = 1; i <= t.arity(); ++i) atoms.push_back(Formula::predicate(projection_name(i)));
  return apply_connective(t, atoms);
}

namespace {

ConnectiveTerm from_formula_rec(const Formula& f, int arity, std::unordered_map<const FormulaNode*, ConnectiveTerm>& memo) {
  if (auto it = memo.find(f.node()); it != memo.end()) return it->second;
  ConnectiveTerm out = [&] {
    switch (f.kind()) {
    case FormulaKind::Constant: return ConnectiveTerm::constant(f.value(), arity);
    case FormulaKind::Implies:
      return ConnectiveTerm::implies(from_formula_rec(f.lhs(), arity, memo), from_formula_rec(f.rhs(), arity, memo));
    case FormulaKind::Predicate:
      if (f.terms().empty()) {
        for (int i = 1; i <= arity; ++i) {
          if (f.symbol() == projection_name(i)) return ConnectiveTerm::proj(i, arity);
        }
      }
      throw Error(ErrorKind::UnknownSymbol, "'" + f.symbol() + "' is not a projection x1..x" + std::to_string(arity));
    default: break;
    }
    throw Error(ErrorKind::InvalidArgument, "connective terms use only projections, constants and implication");
  }();
  memo.emplace(f.node(), out);
  return out;
}

} // namespace

ConnectiveTerm term_from_formula(const Formula& f, int arity) {
  std::unordered_map<const FormulaNode*, ConnectiveTerm> memo;
  return from_formula_rec(expand_abbreviations(f), arity, memo);
}

std::string render(const ConnectiveTerm& t) { return render(to_formula(t)); }

} // namespace pavelka
