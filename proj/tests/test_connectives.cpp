#include <doctest.h>

#include <array>

#include "pavelka/connectives.hpp"
#include "pavelka/error.hpp"
#include "pavelka/evaluator.hpp"

#include "support/generators.hpp"
#include "support/naive_eval.hpp"

using namespace pavelka;

namespace {

std::vector<Rational> random_point(gen::Rng& rng, int arity, int den = 24) {
  std::vector<Rational> p;
  for (int i = 0; i < arity; ++i) p.push_back(Rational(gen::uniform(rng, 0, den), den));
  return p;
}

Rational sup_gap(std::span<const Rational> a, std::span<const Rational> b) {
  Rational out(0);
  for (std::size_t i = 0; i < a.size(); ++i) out = max(out, abs(a[i] - b[i]));
  return out;
}

Rational oplus(const Rational& a, const Rational& b) { return min(Rational(1), a + b); }
Rational odot(const Rational& a, const Rational& b) { return max(Rational(0), a + b - Rational(1)); }

} // namespace

TEST_CASE("derived operations have their intended meaning") {
  gen::Rng rng(41);
  auto x = ConnectiveTerm::proj(1, 2), y = ConnectiveTerm::proj(2, 2);
  for (int i = 0; i < 300; ++i) {
    auto p = random_point(rng, 2);
    CHECK(eval_term(ConnectiveTerm::negation(x), p) == Rational(1) - p[0]);
    CHECK(eval_term(ConnectiveTerm::disjunction(x, y), p) == max(p[0], p[1]));
    CHECK(eval_term(ConnectiveTerm::conjunction(x, y), p) == min(p[0], p[1]));
    CHECK(eval_term(ConnectiveTerm::oplus(x, y), p) == oplus(p[0], p[1]));
    CHECK(eval_term(ConnectiveTerm::odot(x, y), p) == odot(p[0], p[1]));
    CHECK(eval_term(ConnectiveTerm::implies(x, y), p) == lukasiewicz_implies(p[0], p[1]));
  }
}

TEST_CASE("the clamp recursion behind the lattice construction") {
  // clamp01(u + V) = (u (+) clamp01(V)) (.) clamp01(V + 1) for u in [0,1]
  gen::Rng rng(42);
  for (int i = 0; i < 2000; ++i) {
    Rational u(gen::uniform(rng, 0, 12), 12);
    Rational v(gen::uniform(rng, -48, 48), 12);
    CHECK(clamp01(u + v) == odot(oplus(u, clamp01(v)), clamp01(v + Rational(1))));
  }
}

TEST_CASE("compiled terms, composition and structural equality") {
  gen::Rng rng(43);
  for (int i = 0; i < 300; ++i) {
    int arity = gen::uniform(rng, 1, 3);
    ConnectiveTerm t = gen::random_connective(rng, arity, 6);
    CompiledTerm c(t);
    std::vector<ConnectiveTerm> inner;
    for (int k = 0; k < arity; ++k) inner.push_back(gen::random_connective(rng, 2, 3));
    ConnectiveTerm composed = compose(t, inner);
    CHECK(composed.arity() == 2);
    for (int j = 0; j < 5; ++j) {
      auto p = random_point(rng, arity);
      CHECK(c(p) == eval_term(t, p));
      auto q = random_point(rng, 2);
      std::vector<Rational> mid;
      for (const auto& s : inner) mid.push_back(eval_term(s, q));
      CHECK(eval_term(composed, q) == eval_term(t, mid));
    }
    CHECK(t == term_from_formula(to_formula(t), arity));
  }
  auto a = ConnectiveTerm::implies(ConnectiveTerm::proj(1, 1), ConnectiveTerm::constant(Rational(1, 2), 1));
  auto b = ConnectiveTerm::implies(ConnectiveTerm::proj(1, 1), ConnectiveTerm::constant(Rational(1, 2), 1));
  CHECK(a == b);
  CHECK_FALSE(a == ConnectiveTerm::negation(ConnectiveTerm::proj(1, 1)));
  CHECK(render(a) == "x1 -> 1/2");
  // sharing: x -> x has two edges to one node
  auto shared = ConnectiveTerm::implies(a, a);
  CHECK(shared.dag_size() == a.dag_size() + 1);
}

TEST_CASE("term errors") {
  CHECK_THROWS_AS(ConnectiveTerm::proj(3, 2), Error);
  CHECK_THROWS_AS(ConnectiveTerm::constant(Rational(2), 1), Error);
  CHECK_THROWS_AS(ConnectiveTerm::implies(ConnectiveTerm::proj(1, 1), ConnectiveTerm::proj(1, 2)), Error);
  auto t = ConnectiveTerm::proj(1, 2);
  CHECK_THROWS_AS(eval_term(t, std::array<Rational, 1>{Rational(0)}), Error);
  CHECK_THROWS_AS(eval_term(t, std::array<Rational, 2>{Rational(2), Rational(0)}), Error);
  std::array<ConnectiveTerm, 1> one{ConnectiveTerm::proj(1, 1)};
  CHECK_THROWS_AS(compose(t, one), Error);
  CHECK_THROWS_AS(term_from_formula(parse_formula("x3", projection_vocabulary(3)), 2), Error);
}

TEST_CASE("syntactic Lipschitz bound is sound") {
  gen::Rng rng(44);
  for (int i = 0; i < 300; ++i) {
    int arity = gen::uniform(rng, 1, 3);
    ConnectiveTerm t = gen::random_connective(rng, arity, 6);
    Rational l = lipschitz_bound(t);
    CompiledTerm c(t);
    for (int j = 0; j < 10; ++j) {
      auto p = random_point(rng, arity), q = random_point(rng, arity);
      CHECK(abs(c(p) - c(q)) <= l * sup_gap(p, q));
    }
  }
  auto x = ConnectiveTerm::proj(1, 1);
  CHECK(lipschitz_bound(x) == Rational(1));
  CHECK(lipschitz_bound(ConnectiveTerm::constant(Rational(1, 3), 1)) == Rational(0));
  CHECK(lipschitz_bound(ConnectiveTerm::negation(x)) == Rational(1));
  CHECK(lipschitz_bound(ConnectiveTerm::disjunction(x, x)) == Rational(1));
  CHECK(lipschitz_bound(ConnectiveTerm::oplus(x, x)) == Rational(2));
  CHECK(lipschitz_bound(half_approx(64)) == Rational(1));
}

TEST_CASE("half_approx is the lattice max_i min(i/n, max(x - i/n, 0))") {
  for (int n : {1, 2, 3, 8, 20}) {
    ConnectiveTerm t = half_approx(n);
    for (const auto& x : grid_points(Rational(1, 4 * n))) {
      Rational expected(0);
      for (int i = 1; i <= n; ++i) expected = max(expected, min(Rational(i, n), max(x - Rational(i, n), Rational(0))));
      CHECK(eval_term(t, std::array<Rational, 1>{x}) == expected);
    }
  }
  CHECK_THROWS_AS(half_approx(0), Error);
}

TEST_CASE("certify is sound off the grid") {
  gen::Rng rng(45);
  Oracle half{1, [](std::span<const Rational> x) { return x[0] / Rational(2); }};
  for (int n : {2, 5, 16}) {
    ConnectiveTerm t = half_approx(n);
    Rational h(1, 8 * n);
    Rational bound = certify(t, half, h, Rational(1, 2));
    CHECK(bound >= grid_error(t, half, h));
    CHECK(bound <= Rational(1, n) + h);
    for (int i = 0; i < 400; ++i) {
      Rational x(gen::uniform(rng, 0, 997), 997);
      CHECK(abs(eval_term(t, std::array<Rational, 1>{x}) - x / Rational(2)) <= bound);
    }
  }
  CHECK(grid_points(Rational(1, 3)) == std::vector<Rational>{Rational(0), Rational(1, 3), Rational(2, 3), Rational(1)});
  CHECK(grid_points(Rational(2, 5)).back() == Rational(1));
  CHECK_THROWS_AS(grid_points(Rational(0)), Error);
}

TEST_CASE("dyadic scaling") {
  gen::Rng rng(46);
  // integer factors need no approximation
  for (int p : {0, 1, 2, 3, 5}) {
    Approximation a = scale_dyadic(p, 0, 4);
    CHECK(a.exact);
    CHECK(a.error_bound == Rational(0));
    for (const auto& x : grid_points(Rational(1, 40)))
      CHECK(eval_term(a.term, std::array<Rational, 1>{x}) == clamp01(Rational(p) * x));
  }
  for (auto [p, k] : {std::pair{1, 1}, std::pair{3, 2}, std::pair{5, 3}, std::pair{7, 1}, std::pair{1, 4}}) {
    Rational factor = Rational(p) / Rational(std::int64_t(1) << k);
    Rational previous(2);
    for (int n : {4, 16, 64}) {
      Approximation a = scale_dyadic(p, k, n);
      CHECK_FALSE(a.exact);
      CHECK(a.error_bound <= previous);
      previous = a.error_bound;
      for (int i = 0; i < 200; ++i) {
        Rational x(gen::uniform(rng, 0, 509), 509);
        CHECK(abs(eval_term(a.term, std::array<Rational, 1>{x}) - clamp01(factor * x)) <= a.error_bound);
      }
    }
    CHECK(previous < Rational(1, 4));
  }
  CHECK_THROWS_AS(scale_dyadic(1, 63, 4), Error);
  CHECK_THROWS_AS(scale_dyadic(-1, 1, 4), Error);
}

TEST_CASE("lattice approximation") {
  gen::Rng rng(47);
  // max(min(x + y - 1/2, 1 - x), 2x - 1) style targets with integer coefficients are exact
  PLSpec exact{2, {{AffinePiece{{Rational(1), Rational(1)}, Rational(-1, 2)}, AffinePiece{{Rational(-1), Rational(0)}, Rational(1)}},
                   {AffinePiece{{Rational(2), Rational(0)}, Rational(-1)}}}};
  Approximation a = approx_lattice(exact, 4);
  CHECK(a.exact);
  CHECK(a.error_bound == Rational(0));
  for (int i = 0; i < 300; ++i) {
    auto p = random_point(rng, 2, 60);
    CHECK(eval_term(a.term, p) == exact.eval(p));
  }

  PLSpec halves{2, {{AffinePiece{{Rational(1, 2), Rational(3, 4)}, Rational(0)}}, {AffinePiece{{Rational(-1, 2), Rational(0)}, Rational(1, 2)}}}};
  CHECK(halves.lipschitz_constant() == Rational(5, 4));
  for (int n : {4, 32}) {
    Approximation b = approx_lattice(halves, n);
    CHECK_FALSE(b.exact);
    for (int i = 0; i < 300; ++i) {
      auto p = random_point(rng, 2, 97);
      CHECK(abs(eval_term(b.term, p) - halves.eval(p)) <= b.error_bound);
    }
    if (n == 32) CHECK(b.error_bound < Rational(1, 4));
  }

  PLSpec thirds{1, {{AffinePiece{{Rational(1, 3)}, Rational(0)}}}};
  CHECK_THROWS_AS(approx_lattice(thirds, 4), Error);
  PLSpec empty{1, {}};
  CHECK_THROWS_AS(empty.check(), Error);
  PLSpec wrong{2, {{AffinePiece{{Rational(1)}, Rational(0)}}}};
  CHECK_THROWS_AS(wrong.check(), Error);
}

TEST_CASE("applying a connective to formulas") {
  gen::Rng rng(48);
  Vocabulary v = gen::standard_vocabulary();
  auto t = ConnectiveTerm::oplus(ConnectiveTerm::proj(1, 2), ConnectiveTerm::negation(ConnectiveTerm::proj(2, 2)));
  for (int i = 0; i < 100; ++i) {
    Structure m = gen::random_structure(rng, v, 3);
    std::vector<Formula> fs{gen::random_sentence(rng, v, 3), gen::random_sentence(rng, v, 3)};
    Formula applied = apply_connective(t, fs);
    std::array<Rational, 2> point{naive::eval(m, fs[0]), naive::eval(m, fs[1])};
    CHECK(naive::eval(m, applied) == eval_term(t, point));
  }
  std::vector<Formula> one{parse_formula("P(c)", v)};
  CHECK_THROWS_AS(apply_connective(t, one), Error);
  CHECK(projection_name(3) == "x3");
  CHECK(projection_vocabulary(2).predicate_arity("x2") == 0);
}
