#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace pavelka {

// Exact rational number. Values that fit in 64-bit numerator/denominator are
// kept inline; anything larger is promoted to a shared GMP rational. The two
// representations are never both "live": a value is small iff `big_` is null,
// and a big value is always demoted back when it fits.
class Rational {
public:
  Rational() = default;
  Rational(int value) : num_(value) {}
  Rational(std::int64_t value) : num_(value) {}
  Rational(std::int64_t num, std::int64_t den);
  explicit Rational(const mpq_class& value);

  // Accepts "p/q", "p", and finite decimals such as "0.25" (optionally signed).
  static Rational parse(std::string_view text);

  // Lowest terms: "p/q", or "p" when the denominator is 1.
  std::string str() const;

  mpq_class to_mpq() const;
  mpz_class numerator() const;
  mpz_class denominator() const;
  double to_double() const;

  int sign() const;
  bool is_integer() const;
  bool is_small() const noexcept { return big_ == nullptr; }
  bool in_unit_interval() const { return sign() >= 0 && *this <= Rational(1); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;
  Rational& operator+=(const Rational& other) { return *this = *this + other; }
  Rational& operator-=(const Rational& other) { return *this = *this - other; }

  friend bool operator==(const Rational& a, const Rational& b);
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }
Rational abs(const Rational& value);
// Clamp into [0,1].
Rational clamp01(const Rational& value);

// Lukasiewicz implication min{1 - x + y, 1}.
Rational lukasiewicz_implies(const Rational& x, const Rational& y);

} // namespace pavelka
