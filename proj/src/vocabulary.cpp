#include <cctype>
#include <sstream>

#include "pavelka/error.hpp"
#include "pavelka/syntax.hpp"

namespace pavelka {

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name[0]);
  if (!std::isalpha(head) && head != '_') return false;
  for (char c : name.substr(1)) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && u != '_' && u != '\'') return false;
  }
  return true;
}

bool is_reserved(std::string_view name) { return name == "d" || name == "E" || name == "A"; }

void Vocabulary::check_new_name(const std::string& name, int arity) const {
  if (!is_identifier(name)) throw Error(ErrorKind::InvalidArgument, "invalid symbol name '" + name + "'");
  if (is_reserved(name)) throw Error(ErrorKind::NameClash, "symbol name '" + name + "' is reserved");
  if (arity < 0) throw Error(ErrorKind::InvalidArgument, "negative arity for '" + name + "'");
  if (contains(name)) throw Error(ErrorKind::NameClash, "symbol '" + name + "' declared twice");
}

void Vocabulary::add_predicate(const std::string& name, int arity) {
  check_new_name(name, arity);
  predicates_.emplace(name, arity);
}

void Vocabulary::add_operation(const std::string& name, int arity) {
  check_new_name(name, arity);
  operations_.emplace(name, arity);
}

std::optional<int> Vocabulary::predicate_arity(const std::string& name) const {
  auto it = predicates_.find(name);
  if (it == predicates_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Vocabulary::operation_arity(const std::string& name) const {
  auto it = operations_.find(name);
  if (it == operations_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::contains(const std::string& name) const {
  return predicates_.count(name) > 0 || operations_.count(name) > 0;
}

std::vector<std::string> Vocabulary::constants() const {
  std::vector<std::string> out;
  for (const auto& [name, arity] : operations_) {
    if (arity == 0) out.push_back(name);
  }
  return out;
}

bool Vocabulary::is_subvocabulary_of(const Vocabulary& other) const {
  for (const auto& [name, arity] : predicates_) {
    if (other.predicate_arity(name) != arity) return false;
  }
  for (const auto& [name, arity] : operations_) {
    if (other.operation_arity(name) != arity) return false;
  }
  return true;
}

Vocabulary Vocabulary::merged(const Vocabulary& other) const {
  Vocabulary out = *this;
  for (const auto& [name, arity] : other.predicates_) {
    if (predicate_arity(name) == arity) continue;
    out.add_predicate(name, arity);
  }
  for (const auto& [name, arity] : other.operations_) {
    if (operation_arity(name) == arity) continue;
    out.add_operation(name, arity);
  }
  return out;
}

Vocabulary Vocabulary::parse(std::string_view text) {
  Vocabulary vocabulary;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string keyword, name;
    if (!(words >> keyword)) continue;
    auto fail = [&](const std::string& why) {
      return Error(ErrorKind::Syntax, "vocabulary line " + std::to_string(line_no) + ": " + why);
    };
    if (!(words >> name)) throw fail("missing symbol name");
    int arity = 0;
    if (keyword == "pred" || keyword == "op") {
      if (!(words >> arity)) throw fail("missing arity");
    } else if (keyword != "const") {
      throw fail("unknown declaration '" + keyword + "'");
    }
    std::string extra;
    if (words >> extra) throw fail("trailing text '" + extra + "'");
    if (keyword == "pred") {
      vocabulary.add_predicate(name, arity);
    } else {
      vocabulary.add_operation(name, arity);
    }
  }
  return vocabulary;
}

std::string Vocabulary::to_text() const {
  std::ostringstream out;
  for (const auto& [name, arity] : predicates_) out << "pred " << name << ' ' << arity << '\n';
  for (const auto& [name, arity] : operations_) {
    if (arity == 0) {
      out << "const " << name << '\n';
    } else {
      out << "op " << name << ' ' << arity << '\n';
    }
  }
  return out.str();
}

void Signature::check() const {
  for (const auto& [symbol, samples] : moduli) {
    if (!vocabulary.contains(symbol)) {
      throw Error(ErrorKind::VocabularyMismatch, "modulus given for undeclared symbol '" + symbol + "'");
    }
    for (const auto& m : samples) {
      if (m.epsilon.sign() <= 0 || m.epsilon >= Rational(1) || m.delta.sign() <= 0 || m.delta >= Rational(1)) {
        throw Error(ErrorKind::InvalidArgument,
                    "modulus for '" + symbol + "' must have 0 < epsilon, delta < 1");
      }
    }
  }
}

const std::vector<Modulus>& Signature::moduli_for(const std::string& symbol) const {
  static const std::vector<Modulus> none;
  auto it = moduli.find(symbol);
  return it == moduli.end() ? none : it->second;
}

} // namespace pavelka
