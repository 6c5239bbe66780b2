// Backend contract called by atomic tactic nodes, and the built-in sequent prover.
#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "psg/logic.hpp"

namespace psg {

/// One way a tactic can reduce a goal. An empty subgoal list discharges it.
struct Alternative {
  std::vector<Goal> subgoals;
};

/// Hands out goal ids. Each session owns one, so concurrent sessions never race.
class GoalIdSource {
 public:
  explicit GoalIdSource(std::uint64_t next = 0) : next_(next) {}
  GoalId next() { return GoalId{next_++}; }
  std::uint64_t peek() const { return next_; }

 private:
  std::uint64_t next_;
};

/// Tactic bodies produce sequents; ids are stamped by apply_tactic.
using TacticFn = std::function<std::vector<std::vector<Goal>>(const Goal&)>;

class UnknownTacticError : public std::runtime_error {
 public:
  explicit UnknownTacticError(const std::string& name)
      : std::runtime_error("unknown tactic '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DuplicateTacticError : public std::runtime_error {
 public:
  explicit DuplicateTacticError(const std::string& name)
      : std::runtime_error("tactic '" + name + "' is already registered") {}
};

class TacticRegistry {
 public:
  void register_tactic(const std::string& name, TacticFn fn);
  bool contains(const std::string& name) const { return tactics_.count(name) > 0; }
  std::vector<std::string> names() const;
  const TacticFn& lookup(const std::string& name) const;

 private:
  std::map<std::string, TacticFn> tactics_;
};

std::vector<std::string> list_tactics(const TacticRegistry& reg);

/// Ordered alternatives; empty means the tactic does not apply.
std::vector<Alternative> apply_tactic(const TacticRegistry& reg, const std::string& name, const Goal& goal,
                                      GoalIdSource& ids);

/// conj_intro, imp_intro, all_intro, exists_elim, exists_intro, conj_elim,
/// disj_intro, disj_elim, assumption, true_intro, false_elim and strip_conj.
const TacticRegistry& builtin_registry();

/// Hint used for constants introduced by all_intro / exists_elim.
inline constexpr const char* kFreshHint = "c";

}  // namespace psg
