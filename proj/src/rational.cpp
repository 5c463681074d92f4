#include "pavelka/rational.hpp"

#include <cctype>
#include <limits>

#include "pavelka/error.hpp"

namespace pavelka {

const char* to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Syntax: return "syntax";
  case ErrorKind::UnknownSymbol: return "unknown-symbol";
  case ErrorKind::ArityMismatch: return "arity-mismatch";
  case ErrorKind::ConstantRange: return "constant-range";
  case ErrorKind::NameClash: return "name-clash";
  case ErrorKind::VocabularyMismatch: return "vocabulary-mismatch";
  case ErrorKind::UnassignedVariable: return "unassigned-variable";
  case ErrorKind::NotSentence: return "not-sentence";
  case ErrorKind::InvalidArgument: return "invalid-argument";
  case ErrorKind::NonDiscrete: return "non-discrete";
  case ErrorKind::EmptyRestriction: return "empty-restriction";
  case ErrorKind::OperationEscapes: return "operation-escapes";
  case ErrorKind::Resolution: return "resolution";
  case ErrorKind::SearchTooLarge: return "search-too-large";
  case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {

constexpr __int128 kSmallMax = std::numeric_limits<std::int64_t>::max();

unsigned __int128 gcd128(unsigned __int128 a, unsigned __int128 b) {
  while (b != 0) {
    unsigned __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

mpz_class mpz_from_wide(__int128 value) {
  bool negative = value < 0;
  unsigned __int128 magnitude = negative ? static_cast<unsigned __int128>(-(value + 1)) + 1
                                         : static_cast<unsigned __int128>(value);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(magnitude >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(magnitude)));
  mpz_class result = (hi << 64) + lo;
  return negative ? mpz_class(-result) : result;
}

bool fits_small(const mpz_class& z) {
  return mpz_fits_slong_p(z.get_mpz_t()) && z != mpz_class(std::numeric_limits<long>::min());
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) {
    throw Error(ErrorKind::InvalidArgument, "rational with zero denominator");
  }
  *this = from_wide(num, den);
}

Rational::Rational(const mpq_class& value) {
  mpq_class q(value);
  q.canonicalize();
  if (fits_small(q.get_num()) && fits_small(q.get_den())) {
    num_ = q.get_num().get_si();
    den_ = q.get_den().get_si();
  } else {
    big_ = std::make_shared<const mpq_class>(std::move(q));
  }
}

Rational Rational::from_wide(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  unsigned __int128 mag = num < 0 ? static_cast<unsigned __int128>(-num) : static_cast<unsigned __int128>(num);
  unsigned __int128 g = gcd128(mag, static_cast<unsigned __int128>(den));
  if (g > 1) {
    num /= static_cast<__int128>(g);
    den /= static_cast<__int128>(g);
  }
  if (num >= -kSmallMax && num <= kSmallMax && den <= kSmallMax) {
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }
  return Rational(mpq_class(mpz_from_wide(num), mpz_from_wide(den)));
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&](const char* why) {
    return Error(ErrorKind::Syntax, "invalid rational '" + std::string(text) + "': " + why);
  };
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  auto digits = [&](std::string& out) {
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      out.push_back(text[i++]);
    }
  };
  std::string whole;
  digits(whole);
  if (whole.empty()) throw fail("expected digits");
  mpq_class value;
  if (i == text.size()) {
    value = mpq_class(mpz_class(whole, 10));
  } else if (text[i] == '/') {
    ++i;
    std::string den;
    digits(den);
    if (den.empty() || i != text.size()) throw fail("malformed denominator");
    mpz_class d(den, 10);
    if (d == 0) throw fail("zero denominator");
    value = mpq_class(mpz_class(whole, 10), d);
  } else if (text[i] == '.') {
    ++i;
    std::string frac;
    digits(frac);
    if (frac.empty() || i != text.size()) throw fail("malformed decimal");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    value = mpq_class(mpz_class(whole + frac, 10), scale);
  } else {
    throw fail("unexpected character");
  }
  value.canonicalize();
  if (negative) value = -value;
  return Rational(value);
}

std::string Rational::str() const {
  if (big_) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

mpz_class Rational::numerator() const { return to_mpq().get_num(); }
mpz_class Rational::denominator() const { return to_mpq().get_den(); }

double Rational::to_double() const {
  if (big_) return big_->get_d();
  return static_cast<double>(num_) / static_cast<double>(den_);
}

int Rational::sign() const {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

bool Rational::is_integer() const {
  if (big_) return big_->get_den() == 1;
  return den_ == 1;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == b.den_) return Rational::from_wide(static_cast<__int128>(a.num_) + b.num_, a.den_);
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                               static_cast<__int128>(a.den_) * b.den_);
  }
  return Rational(mpq_class(a.to_mpq() + b.to_mpq()));
}

Rational operator-(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == b.den_) return Rational::from_wide(static_cast<__int128>(a.num_) - b.num_, a.den_);
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                               static_cast<__int128>(a.den_) * b.den_);
  }
  return Rational(mpq_class(a.to_mpq() - b.to_mpq()));
}

Rational operator*(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  return Rational(mpq_class(a.to_mpq() * b.to_mpq()));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.sign() == 0) throw Error(ErrorKind::InvalidArgument, "division by zero");
  if (!a.big_ && !b.big_) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  return Rational(mpq_class(a.to_mpq() / b.to_mpq()));
}

Rational Rational::operator-() const {
  if (!big_) {
    Rational r = *this;
    r.num_ = -num_;
    return r;
  }
  return Rational(mpq_class(-*big_));
}

bool operator==(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  return false; // canonical representations never mix for equal values
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == b.den_) return a.num_ <=> b.num_;
    __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs < rhs ? std::strong_ordering::less
                     : (lhs > rhs ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  int c = cmp(a.to_mpq(), b.to_mpq());
  return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

Rational abs(const Rational& value) { return value.sign() < 0 ? -value : value; }

Rational clamp01(const Rational& value) {
  if (value.sign() < 0) return Rational(0);
  if (value > Rational(1)) return Rational(1);
  return value;
}

Rational lukasiewicz_implies(const Rational& x, const Rational& y) {
  if (x <= y) return Rational(1);
  return Rational(1) - x + y;
}

} // namespace pavelka
