// Object logic for the built-in prover: first-order formulas over constants
// and variables (no function symbols), sequent goals, text syntax.
#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace psg {

bool is_identifier(std::string_view s);

class Term {
 public:
  enum class Kind { Var, Const };

  static Term var(std::string name);
  static Term constant(std::string name);

  Kind kind() const { return kind_; }
  bool is_var() const { return kind_ == Kind::Var; }
  const std::string& name() const { return name_; }

  friend bool operator==(const Term&, const Term&) = default;

 private:
  Term(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
  Kind kind_;
  std::string name_;
};

enum class Connective { Atom, True, False, Not, And, Or, Imp, Forall, Exists };

std::string_view connective_name(Connective c);

/// Immutable formula tree with shared subterms. Copies are cheap.
class Formula {
 public:
  static Formula atom(std::string pred, std::vector<Term> args = {});
  static Formula truth();
  static Formula falsity();
  static Formula negation(Formula f);
  static Formula conj(Formula l, Formula r);
  static Formula disj(Formula l, Formula r);
  static Formula imp(Formula l, Formula r);
  static Formula forall(std::string bound, Formula body);
  static Formula exists(std::string bound, Formula body);
  static Formula quantifier(Connective q, std::string bound, Formula body);
  static Formula binary(Connective c, Formula l, Formula r);

  Connective kind() const;
  bool is(Connective c) const { return kind() == c; }
  bool is_binary() const;
  bool is_quantifier() const;

  // Atom accessors.
  const std::string& pred() const;
  std::span<const Term> args() const;
  // Not: operand(); binary: lhs()/rhs(); quantifier: bound()/body().
  const Formula& operand() const;
  const Formula& lhs() const;
  const Formula& rhs() const;
  const std::string& bound() const;
  const Formula& body() const;

  /// Structural equality (bound names must match too); see alpha_equal.
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, std::string found);

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
  std::string found_;
};

/// Identifiers bound by an enclosing quantifier parse as variables, `?x` is a
/// free variable, and every other term identifier is a constant.
Formula parse_formula(std::string_view text);
std::string pretty(const Formula& f);
std::string pretty(const Term& t);

Formula substitute(const Formula& f, const std::string& var, const Term& t);
bool alpha_equal(const Formula& a, const Formula& b);

/// Canonical text of the alpha-class: alpha_equal(a, b) iff keys are equal.
std::string canonical_key(const Formula& f);

std::set<std::string> free_vars(const Formula& f);
/// Every identifier used as a term or binder name.
void collect_term_names(const Formula& f, std::set<std::string>& out);
void collect_constants(const Formula& f, std::set<std::string>& out);

struct GoalId {
  std::uint64_t value = 0;

  std::string str() const { return "g" + std::to_string(value); }
  static GoalId parse(std::string_view text);  // "g12"; throws on bad input

  friend auto operator<=>(const GoalId&, const GoalId&) = default;
};

struct Goal {
  GoalId id;
  std::vector<Formula> hyps;
  Formula concl = Formula::truth();

  /// Same sequent: hypotheses pairwise alpha-equal (in order) and conclusions alpha-equal.
  bool same_content(const Goal& other) const;
};

/// `h1, h2 |- c` or `|- c`.
Goal parse_goal(std::string_view text);
std::string pretty(const Goal& g);
std::string canonical_key(const Goal& g);

std::set<std::string> constants_of(const Goal& g);
bool is_closed(const Goal& g);

/// Const named hint, hint_1, hint_2, ... whichever first does not occur in goal.
Term fresh_const(const Goal& goal, const std::string& hint);

}  // namespace psg
