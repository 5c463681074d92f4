#include "pavelka/syntax.hpp"

namespace pavelka {

namespace {

void render_term(const Term& t, std::string& out) {
  out += t.name();
  if (t.is_variable() || t.args().empty()) return;
  out += '(';
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i) out += ',';
    render_term(t.args()[i], out);
  }
  out += ')';
}

// Atoms, constants and negations never need parentheses as operands.
bool self_delimiting(const Formula& f) {
  return f.is_atomic() || f.kind() == FormulaKind::Constant || f.kind() == FormulaKind::Not;
}

void render_formula(const Formula& f, std::string& out);

void render_operand(const Formula& f, std::string& out) {
  if (self_delimiting(f)) {
    render_formula(f, out);
    return;
  }
  out += '(';
  render_formula(f, out);
  out += ')';
}

void render_formula(const Formula& f, std::string& out) {
  switch (f.kind()) {
  case FormulaKind::Metric:
    out += "d(";
    render_term(f.terms()[0], out);
    out += ',';
    render_term(f.terms()[1], out);
    out += ')';
    return;
  case FormulaKind::Predicate:
    out += f.symbol();
    if (!f.terms().empty()) {
      out += '(';
      for (std::size_t i = 0; i < f.terms().size(); ++i) {
        if (i) out += ',';
        render_term(f.terms()[i], out);
      }
      out += ')';
    }
    return;
  case FormulaKind::Constant: out += f.value().str(); return;
  case FormulaKind::Implies:
  case FormulaKind::Or:
  case FormulaKind::And: {
    const char* op = f.kind() == FormulaKind::Implies ? " -> " : (f.kind() == FormulaKind::Or ? " \\/ " : " /\\ ");
    render_operand(f.lhs(), out);
    out += op;
    render_operand(f.rhs(), out);
    return;
  }
  case FormulaKind::AtMost:
  case FormulaKind::AtLeast:
    render_operand(f.operand(), out);
    out += f.kind() == FormulaKind::AtMost ? " <= " : " >= ";
    out += f.value().str();
    return;
  case FormulaKind::Not:
    out += '~';
    render_operand(f.operand(), out);
    return;
  case FormulaKind::Exists:
  case FormulaKind::Forall:
    out += f.kind() == FormulaKind::Exists ? "E " : "A ";
    out += f.variable();
    out += ". ";
    render_formula(f.body(), out);
    return;
  }
}

} // namespace

std::string render(const Term& term) {
  std::string out;
  render_term(term, out);
  return out;
}

std::string render(const Formula& formula) {
  std::string out;
  render_formula(formula, out);
  return out;
}

} // namespace pavelka
