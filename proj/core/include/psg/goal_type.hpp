// Goal types: conjunctions of possibly negated predicates that label wires.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "psg/logic.hpp"

namespace psg {

enum class GoalTypeKind { Any, ConclIs, HypIs, ConclInHyps, NumHyps, Closed };
enum class Comparison { Eq, Le, Ge };

struct GoalTypeAtom {
  GoalTypeKind kind = GoalTypeKind::Any;
  Connective sym = Connective::Atom;  // ConclIs / HypIs
  Comparison cmp = Comparison::Eq;    // NumHyps
  std::size_t n = 0;                  // NumHyps

  static GoalTypeAtom any() { return {}; }
  static GoalTypeAtom concl_is(Connective s) { return {GoalTypeKind::ConclIs, s}; }
  static GoalTypeAtom hyp_is(Connective s) { return {GoalTypeKind::HypIs, s}; }
  static GoalTypeAtom concl_in_hyps() { return {GoalTypeKind::ConclInHyps}; }
  static GoalTypeAtom num_hyps(Comparison c, std::size_t n) {
    return {GoalTypeKind::NumHyps, Connective::Atom, c, n};
  }
  static GoalTypeAtom closed() { return {GoalTypeKind::Closed}; }

  friend bool operator==(const GoalTypeAtom&, const GoalTypeAtom&) = default;
};

struct GoalTypeLiteral {
  bool negated = false;
  GoalTypeAtom atom;

  friend bool operator==(const GoalTypeLiteral&, const GoalTypeLiteral&) = default;
};

/// Conjunction of literals; the empty conjunction accepts every goal.
struct GoalType {
  std::vector<GoalTypeLiteral> literals;

  bool is_any() const { return literals.empty(); }
  friend bool operator==(const GoalType&, const GoalType&) = default;
};

class GoalTypeError : public std::runtime_error {
 public:
  GoalTypeError(std::size_t offset, const std::string& message)
      : std::runtime_error("goal type error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Positive `any` literals are dropped, so "any" alone parses to the empty conjunction.
GoalType parse_goaltype(std::string_view text);
std::string pretty(const GoalType& gt);
std::string pretty(const GoalTypeAtom& atom);

bool eval_atom(const GoalTypeAtom& atom, const Goal& g);
bool eval_goaltype(const GoalType& gt, const Goal& g);

std::optional<Connective> top_symbol_from_name(std::string_view name);

/// Conservative unsatisfiability check used by lint: `!any`, a literal next to
/// its own negation, or num_hyps literals admitting no hypothesis count.
bool looks_unsatisfiable(const GoalType& gt);

}  // namespace psg
