#include <cctype>

#include "pavelka/error.hpp"
#include "pavelka/syntax.hpp"

namespace pavelka {

namespace {

enum class Tok { End, Ident, Number, LParen, RParen, Comma, Dot, Arrow, Or, And, Not, Le, Ge };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

const char* describe(Tok t) {
  switch (t) {
  case Tok::End: return "end of input";
  case Tok::Ident: return "identifier";
  case Tok::Number: return "rational literal";
  case Tok::LParen: return "'('";
  case Tok::RParen: return "')'";
  case Tok::Comma: return "','";
  case Tok::Dot: return "'.'";
  case Tok::Arrow: return "'->'";
  case Tok::Or: return "'\\/'";
  case Tok::And: return "'/\\'";
  case Tok::Not: return "'~'";
  case Tok::Le: return "'<='";
  case Tok::Ge: return "'>='";
  }
  return "token";
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto error = [&](std::size_t at, const std::string& why) {
    return Error(ErrorKind::Syntax, "syntax error at offset " + std::to_string(at) + ": " + why, at);
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '\'')) ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i + 1 < s.size() && (s[i] == '/' || s[i] == '.') && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
      continue;
    }
    auto two = s.substr(i, 2);
    if (two == "->") {
      out.push_back({Tok::Arrow, "->", start});
      i += 2;
    } else if (two == "\\/") {
      out.push_back({Tok::Or, "\\/", start});
      i += 2;
    } else if (two == "/\\") {
      out.push_back({Tok::And, "/\\", start});
      i += 2;
    } else if (two == "<=") {
      out.push_back({Tok::Le, "<=", start});
      i += 2;
    } else if (two == ">=") {
      out.push_back({Tok::Ge, ">=", start});
      i += 2;
    } else if (c == '(') {
      out.push_back({Tok::LParen, "(", start});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::RParen, ")", start});
      ++i;
    } else if (c == ',') {
      out.push_back({Tok::Comma, ",", start});
      ++i;
    } else if (c == '.') {
      out.push_back({Tok::Dot, ".", start});
      ++i;
    } else if (c == '~') {
      out.push_back({Tok::Not, "~", start});
      ++i;
    } else {
      throw error(start, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
public:
  Parser(std::string_view text, const Vocabulary& vocabulary) : tokens_(lex(text)), vocabulary_(vocabulary) {}

  Formula parse_all() {
    Formula f = formula();
    expect(Tok::End);
    return f;
  }

  Term parse_term_all() {
    Term t = term();
    expect(Tok::End);
    return t;
  }

private:
  const Token& peek() const { return tokens_[index_]; }
  const Token& next() { return tokens_[index_++]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++index_;
    return true;
  }

  Error error_at(const Token& t, const std::string& why, ErrorKind kind = ErrorKind::Syntax) const {
    return Error(kind, "error at offset " + std::to_string(t.pos) + ": " + why, t.pos);
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) {
      throw error_at(peek(), std::string("expected ") + describe(kind) + ", found " +
                                 (peek().kind == Tok::End ? std::string("end of input") : "'" + peek().text + "'"));
    }
    return next();
  }

  Formula formula() {
    Formula lhs = disjunction();
    if (accept(Tok::Arrow)) return Formula::implies(lhs, formula());
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (accept(Tok::Or)) f = Formula::disjunction(f, conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = comparison();
    while (accept(Tok::And)) f = Formula::conjunction(f, comparison());
    return f;
  }

  Formula comparison() {
    Formula f = unary();
    while (peek().kind == Tok::Le || peek().kind == Tok::Ge) {
      bool at_most = next().kind == Tok::Le;
      Rational bound = rational(expect(Tok::Number));
      f = at_most ? Formula::at_most(f, bound) : Formula::at_least(f, bound);
    }
    return f;
  }

  Formula unary() {
    if (accept(Tok::Not)) return Formula::negation(unary());
    const Token& t = peek();
    if (t.kind == Tok::Ident && (t.text == "E" || t.text == "A")) {
      next();
      const Token& var = expect(Tok::Ident);
      check_variable(var);
      expect(Tok::Dot);
      Formula body = formula();
      return t.text == "E" ? Formula::exists(var.text, body) : Formula::forall(var.text, body);
    }
    return atom();
  }

  Rational rational(const Token& t) const {
    Rational r = Rational::parse(t.text);
    if (!r.in_unit_interval()) {
      throw error_at(t, "constant " + r.str() + " lies outside [0,1]", ErrorKind::ConstantRange);
    }
    return r;
  }

  Formula atom() {
    const Token& t = next();
    switch (t.kind) {
    case Tok::LParen: {
      Formula f = formula();
      expect(Tok::RParen);
      return f;
    }
    case Tok::Number: return Formula::constant(rational(t));
    case Tok::Ident: {
      if (t.text == "d") {
        expect(Tok::LParen);
        Term lhs = term();
        expect(Tok::Comma);
        Term rhs = term();
        expect(Tok::RParen);
        return Formula::metric(lhs, rhs);
      }
      auto arity = vocabulary_.predicate_arity(t.text);
      if (!arity) {
        if (vocabulary_.operation_arity(t.text)) {
          throw error_at(t, "'" + t.text + "' is an operation symbol, expected a formula", ErrorKind::UnknownSymbol);
        }
        throw error_at(t, "unknown predicate '" + t.text + "'", ErrorKind::UnknownSymbol);
      }
      std::vector<Term> args = arguments();
      if (static_cast<int>(args.size()) != *arity) {
        throw error_at(t,
                       "predicate '" + t.text + "' has arity " + std::to_string(*arity) + " but got " +
                           std::to_string(args.size()) + " arguments",
                       ErrorKind::ArityMismatch);
      }
      return Formula::predicate(t.text, std::move(args));
    }
    default:
      throw error_at(t, std::string("unexpected ") +
                            (t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'"));
    }
  }

  std::vector<Term> arguments() {
    std::vector<Term> args;
    if (!accept(Tok::LParen)) return args;
    if (accept(Tok::RParen)) return args;
    args.push_back(term());
    while (accept(Tok::Comma)) args.push_back(term());
    expect(Tok::RParen);
    return args;
  }

  void check_variable(const Token& t) const {
    if (is_reserved(t.text)) throw error_at(t, "'" + t.text + "' is reserved and cannot be a variable");
    if (vocabulary_.contains(t.text)) {
      throw error_at(t, "'" + t.text + "' is a vocabulary symbol and cannot be a variable", ErrorKind::NameClash);
    }
  }

  Term term() {
    const Token& t = expect(Tok::Ident);
    if (is_reserved(t.text)) throw error_at(t, "'" + t.text + "' cannot be used as a term");
    if (vocabulary_.predicate_arity(t.text)) {
      throw error_at(t, "'" + t.text + "' is a predicate symbol, expected a term", ErrorKind::UnknownSymbol);
    }
    auto arity = vocabulary_.operation_arity(t.text);
    if (!arity) {
      if (peek().kind == Tok::LParen) {
        throw error_at(t, "unknown operation '" + t.text + "'", ErrorKind::UnknownSymbol);
      }
      return Term::variable(t.text);
    }
    std::vector<Term> args = arguments();
    if (static_cast<int>(args.size()) != *arity) {
      throw error_at(t,
                     "operation '" + t.text + "' has arity " + std::to_string(*arity) + " but got " +
                         std::to_string(args.size()) + " arguments",
                     ErrorKind::ArityMismatch);
    }
    return Term::apply(t.text, std::move(args));
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
  const Vocabulary& vocabulary_;
};

} // namespace

Formula parse_formula(std::string_view text, const Vocabulary& vocabulary) {
  Parser parser(text, vocabulary);
  return parser.parse_all();
}

Term parse_term(std::string_view text, const Vocabulary& vocabulary) {
  Parser parser(text, vocabulary);
  return parser.parse_term_all();
}

} // namespace pavelka
