#include <doctest.h>

#include <random>

#include "pavelka/error.hpp"
#include "pavelka/rational.hpp"

using pavelka::Rational;

namespace {

// Oracle: GMP's own rational arithmetic.
mpq_class q(const Rational& r) { return r.to_mpq(); }

Rational random_rational(std::mt19937_64& rng, bool wide) {
  std::int64_t limit = wide ? (std::int64_t(1) << 62) : 1000;
  std::uniform_int_distribution<std::int64_t> num(-limit, limit), den(1, limit);
  return Rational(num(rng), den(rng));
}

} // namespace

TEST_CASE("parse and print") {
  CHECK(Rational::parse("1/3").str() == "1/3");
  CHECK(Rational::parse("2/6").str() == "1/3");
  CHECK(Rational::parse("-4/2").str() == "-2");
  CHECK(Rational::parse("0.25") == Rational(1, 4));
  CHECK(Rational::parse("-0.5") == Rational(-1, 2));
  CHECK(Rational::parse("7") == Rational(7));
  CHECK(Rational(3, -6).str() == "-1/2");
  CHECK_THROWS_AS(Rational::parse("1/0"), pavelka::Error);
  CHECK_THROWS_AS(Rational::parse("abc"), pavelka::Error);
  CHECK_THROWS_AS(Rational::parse(""), pavelka::Error);
  CHECK_THROWS_AS(Rational(1, 0), pavelka::Error);
}

TEST_CASE("arithmetic agrees with GMP, including overflow into the big form") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 4000; ++i) {
    bool wide = i % 2 == 0;
    Rational a = random_rational(rng, wide), b = random_rational(rng, wide);
    CHECK(q(a + b) == q(a) + q(b));
    CHECK(q(a - b) == q(a) - q(b));
    CHECK(q(a * b) == q(a) * q(b));
    if (b.sign() != 0) CHECK(q(a / b) == q(a) / q(b));
    CHECK((a < b) == (q(a) < q(b)));
    CHECK((a == b) == (q(a) == q(b)));
    CHECK(q(-a) == -q(a));
  }
}

TEST_CASE("big values demote back to the inline form") {
  Rational big = Rational(std::int64_t(1) << 62) * Rational(std::int64_t(1) << 62);
  CHECK_FALSE(big.is_small());
  Rational back = big / Rational(std::int64_t(1) << 62);
  CHECK(back.is_small());
  CHECK(back == Rational(std::int64_t(1) << 62));
  CHECK(Rational::parse("123456789012345678901234567890/3").str() == "41152263004115226300411522630");
}

TEST_CASE("lukasiewicz implication and clamping") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> k(0, 12);
  for (int i = 0; i < 500; ++i) {
    Rational x(k(rng), 12), y(k(rng), 12);
    Rational v = pavelka::lukasiewicz_implies(x, y);
    CHECK(v == (x <= y ? Rational(1) : Rational(1) - x + y));
    CHECK(v.in_unit_interval());
  }
  CHECK(pavelka::clamp01(Rational(3, 2)) == Rational(1));
  CHECK(pavelka::clamp01(Rational(-1, 2)) == Rational(0));
  CHECK(pavelka::clamp01(Rational(1, 2)) == Rational(1, 2));
  CHECK(pavelka::abs(Rational(-2, 3)) == Rational(2, 3));
}

TEST_CASE("predicates") {
  CHECK(Rational(4, 2).is_integer());
  CHECK_FALSE(Rational(1, 2).is_integer());
  CHECK(Rational(-3, 4).sign() == -1);
  CHECK(Rational(0).sign() == 0);
  CHECK(Rational(1).in_unit_interval());
  CHECK_FALSE(Rational(5, 4).in_unit_interval());
  CHECK(Rational(6, 8).numerator() == 3);
  CHECK(Rational(6, 8).denominator() == 4);
}

TEST_CASE("digit strings are decimal even with leading zeros") {
  CHECK(Rational::parse("010") == Rational(10));
  CHECK(Rational::parse("0.025") == Rational(1, 40));
  CHECK(Rational::parse("007/010") == Rational(7, 10));
}
