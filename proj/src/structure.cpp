#include "pavelka/structure.hpp"

#include <algorithm>

#include "pavelka/error.hpp"

namespace pavelka {

Structure::Structure(std::vector<std::string> universe) : universe_(std::move(universe)) {
  if (universe_.empty()) throw Error(ErrorKind::InvalidArgument, "structure universe must be nonempty");
  std::vector<std::string> sorted = universe_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::InvalidArgument, "duplicate element names in universe");
  }
  for (const auto& e : universe_) {
    if (e.empty() || e.find(',') != std::string::npos) {
      throw Error(ErrorKind::InvalidArgument, "element names must be nonempty and contain no commas: '" + e + "'");
    }
  }
  const std::size_t n = universe_.size();
  metric_.assign(n * n, Rational(1));
  for (std::size_t i = 0; i < n; ++i) metric_[i * n + i] = Rational(0);
}

std::optional<Element> Structure::find(const std::string& name) const {
  auto it = std::find(universe_.begin(), universe_.end(), name);
  if (it == universe_.end()) return std::nullopt;
  return static_cast<Element>(it - universe_.begin());
}

Element Structure::element(const std::string& name) const {
  auto e = find(name);
  if (!e) throw Error(ErrorKind::InvalidArgument, "no element named '" + name + "'");
  return *e;
}

void Structure::set_distance_symmetric(Element a, Element b, const Rational& value) {
  set_distance(a, b, value);
  set_distance(b, a, value);
}

std::size_t Structure::tuple_index(std::span<const Element> args, std::size_t n) {
  std::size_t index = 0;
  for (Element e : args) index = index * n + e;
  return index;
}

std::size_t Structure::tuple_count(int arity) const {
  std::size_t count = 1;
  for (int i = 0; i < arity; ++i) count *= size();
  return count;
}

Tuple Structure::tuple_at(std::size_t index, int arity) const {
  Tuple t(static_cast<std::size_t>(arity));
  for (int i = arity - 1; i >= 0; --i) {
    t[static_cast<std::size_t>(i)] = static_cast<Element>(index % size());
    index /= size();
  }
  return t;
}

void Structure::add_predicate(const std::string& name, int arity, const Rational& fill) {
  if (predicates_.count(name) || operations_.count(name)) {
    throw Error(ErrorKind::NameClash, "symbol '" + name + "' already present");
  }
  if (arity < 0) throw Error(ErrorKind::InvalidArgument, "negative arity");
  predicates_[name] = PredicateTable{arity, std::vector<Rational>(tuple_count(arity), fill)};
}

void Structure::add_operation(const std::string& name, int arity, Element fill) {
  if (predicates_.count(name) || operations_.count(name)) {
    throw Error(ErrorKind::NameClash, "symbol '" + name + "' already present");
  }
  if (arity < 0) throw Error(ErrorKind::InvalidArgument, "negative arity");
  if (fill >= size()) throw Error(ErrorKind::InvalidArgument, "operation value outside the universe");
  operations_[name] = OperationTable{arity, std::vector<Element>(tuple_count(arity), fill)};
}

const PredicateTable& Structure::predicate_table(const std::string& name) const {
  auto it = predicates_.find(name);
  if (it == predicates_.end()) throw Error(ErrorKind::UnknownSymbol, "structure has no predicate '" + name + "'");
  return it->second;
}

PredicateTable& Structure::predicate_table(const std::string& name) {
  auto it = predicates_.find(name);
  if (it == predicates_.end()) throw Error(ErrorKind::UnknownSymbol, "structure has no predicate '" + name + "'");
  return it->second;
}

const OperationTable& Structure::operation_table(const std::string& name) const {
  auto it = operations_.find(name);
  if (it == operations_.end()) throw Error(ErrorKind::UnknownSymbol, "structure has no operation '" + name + "'");
  return it->second;
}

OperationTable& Structure::operation_table(const std::string& name) {
  auto it = operations_.find(name);
  if (it == operations_.end()) throw Error(ErrorKind::UnknownSymbol, "structure has no operation '" + name + "'");
  return it->second;
}

namespace {

void check_args(const Structure& m, const std::string& name, int arity, std::span<const Element> args) {
  if (static_cast<int>(args.size()) != arity) {
    throw Error(ErrorKind::ArityMismatch, "symbol '" + name + "' expects " + std::to_string(arity) + " arguments");
  }
  for (Element e : args) {
    if (e >= m.size()) throw Error(ErrorKind::InvalidArgument, "element index out of range");
  }
}

} // namespace

void Structure::set_predicate(const std::string& name, std::span<const Element> args, const Rational& value) {
  auto& table = predicate_table(name);
  check_args(*this, name, table.arity, args);
  table.values[tuple_index(args, size())] = value;
}

const Rational& Structure::predicate(const std::string& name, std::span<const Element> args) const {
  const auto& table = predicate_table(name);
  check_args(*this, name, table.arity, args);
  return table.values[tuple_index(args, size())];
}

void Structure::set_operation(const std::string& name, std::span<const Element> args, Element value) {
  auto& table = operation_table(name);
  check_args(*this, name, table.arity, args);
  if (value >= size()) throw Error(ErrorKind::InvalidArgument, "operation value outside the universe");
  table.values[tuple_index(args, size())] = value;
}

Element Structure::operation(const std::string& name, std::span<const Element> args) const {
  const auto& table = operation_table(name);
  check_args(*this, name, table.arity, args);
  return table.values[tuple_index(args, size())];
}

void Structure::remove_symbol(const std::string& name) {
  if (!predicates_.erase(name) && !operations_.erase(name)) {
    throw Error(ErrorKind::UnknownSymbol, "structure has no symbol '" + name + "'");
  }
}

Vocabulary Structure::vocabulary() const {
  Vocabulary v;
  for (const auto& [name, table] : predicates_) v.add_predicate(name, table.arity);
  for (const auto& [name, table] : operations_) v.add_operation(name, table.arity);
  return v;
}

void for_each_tuple(std::size_t universe_size, int arity, const std::function<void(const Tuple&)>& visit) {
  Tuple t(static_cast<std::size_t>(arity), 0);
  if (universe_size == 0 && arity > 0) return;
  while (true) {
    visit(t);
    int i = arity - 1;
    while (i >= 0 && t[static_cast<std::size_t>(i)] + 1 == universe_size) {
      t[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) return;
    ++t[static_cast<std::size_t>(i)];
  }
}

} // namespace pavelka
