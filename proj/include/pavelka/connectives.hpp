#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pavelka/rational.hpp"
#include "pavelka/syntax.hpp"

namespace pavelka {

struct ConnectiveNode;

// Term of the connective algebra generated by projections, rational constants
// and the Lukasiewicz implication. Immutable and shared like Formula; large
// constructions rely on that sharing, so terms are DAGs rather than trees.
class ConnectiveTerm {
public:
  enum class Kind { Proj, Const, Implies };

  // Projection onto coordinate `index` (1-based) of an `arity`-ary point.
  static ConnectiveTerm proj(int index, int arity);
  static ConnectiveTerm constant(Rational value, int arity);
  static ConnectiveTerm implies(ConnectiveTerm lhs, ConnectiveTerm rhs);

  // Derived operations, built from implication and constants.
  static ConnectiveTerm negation(ConnectiveTerm t);                    // t -> 0
  static ConnectiveTerm disjunction(ConnectiveTerm a, ConnectiveTerm b); // (a -> b) -> b
  static ConnectiveTerm conjunction(ConnectiveTerm a, ConnectiveTerm b); // ~(~a \/ ~b)
  static ConnectiveTerm oplus(ConnectiveTerm a, ConnectiveTerm b);       // ~a -> b
  static ConnectiveTerm odot(ConnectiveTerm a, ConnectiveTerm b);        // ~(~a (+) ~b)

  Kind kind() const;
  int arity() const;
  int index() const;           // Proj
  const Rational& value() const; // Const
  const ConnectiveTerm& lhs() const;
  const ConnectiveTerm& rhs() const;
  const ConnectiveNode* node() const { return node_.get(); }

  bool is_constant(const Rational& r) const { return kind() == Kind::Const && value() == r; }
  // Number of distinct nodes in the DAG.
  std::size_t dag_size() const;

  friend bool operator==(const ConnectiveTerm& a, const ConnectiveTerm& b);

private:
  explicit ConnectiveTerm(std::shared_ptr<const ConnectiveNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ConnectiveNode> node_;
};

// Target function on [0,1]^arity, used by certify.
struct Oracle {
  int arity = 1;
  std::function<Rational(std::span<const Rational>)> fn;
};

// A term together with a sound bound on its sup-distance to the target.
struct Approximation {
  ConnectiveTerm term;
  Rational error_bound;
  bool exact = false;
};

// clamp01(sum coefficients[i] * x_i + intercept)
struct AffinePiece {
  std::vector<Rational> coefficients;
  Rational intercept;
};

// max over groups of min over pieces.
struct PLSpec {
  int arity = 1;
  std::vector<std::vector<AffinePiece>> groups;

  void check() const;
  Rational eval(std::span<const Rational> point) const;
  // max over pieces of the sum of |coefficients|.
  Rational lipschitz_constant() const;
};

Rational eval_term(const ConnectiveTerm& t, std::span<const Rational> point);

// Evaluates one term at many points without re-walking the DAG.
class CompiledTerm {
public:
  explicit CompiledTerm(const ConnectiveTerm& t);
  int arity() const { return arity_; }
  Rational operator()(std::span<const Rational> point) const;

private:
  struct Step {
    ConnectiveTerm::Kind kind;
    int index;
    Rational value;
    std::size_t lhs, rhs;
  };
  int arity_;
  std::vector<Step> steps_;
};

// Substitutes args[i] for projection i+1 (sharing preserved); every arg must
// have the same arity, which becomes the arity of the result.
ConnectiveTerm compose(const ConnectiveTerm& outer, std::span<const ConnectiveTerm> args);

// Syntactic Lipschitz bound (sup-norm on inputs). Implication adds the bounds
// of its arguments, except for the shapes a -> 0 (negation, bound of a) and
// (a -> b) -> b (max, larger of the two bounds).
Rational lipschitz_bound(const ConnectiveTerm& t);

// Grid points {0, h, 2h, ..., 1} in each coordinate (1 is always included).
std::vector<Rational> grid_points(const Rational& h);

// max over the grid of |t - oracle| plus (L + L_t) * h / 2.
Rational certify(const ConnectiveTerm& t, const Oracle& oracle, const Rational& h, const Rational& target_lipschitz);
// Largest |t - oracle| over the grid of spacing h (no inflation).
Rational grid_error(const ConnectiveTerm& t, const Oracle& oracle, const Rational& h);

// The lattice term max_i (i/n /\ ~(x -> i/n)) for i = 1..n.
ConnectiveTerm half_approx(int n);
// Approximates clamp01((p / 2^k) x) from iterated half_approx(n) and truncated sums.
Approximation scale_dyadic(std::int64_t p, int k, int n);
// Approximates the lattice of truncated affine pieces.
Approximation approx_lattice(const PLSpec& spec, int n);

// Replaces projection i by formulas[i-1].
Formula apply_connective(const ConnectiveTerm& t, std::span<const Formula> formulas);

// Formula form with 0-ary predicates x1..xn standing for the projections.
std::string projection_name(int index);
Vocabulary projection_vocabulary(int arity);
Formula to_formula(const ConnectiveTerm& t);
ConnectiveTerm term_from_formula(const Formula& f, int arity);
std::string render(const ConnectiveTerm& t);

} // namespace pavelka
