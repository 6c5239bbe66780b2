// Exhaustive outcome enumeration for a strategy, and a strategy-free reference
// search over tactic applications used to sanity-check it.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "psg/engine.hpp"

namespace psg {

/// Sorted alpha-class keys of a goal list; equal for alpha-equivalent multisets.
using GoalMultiset = std::vector<std::string>;

GoalMultiset multiset_of(const std::vector<Goal>& goals);

struct OutcomeSet {
  std::map<GoalMultiset, std::vector<Goal>> outcomes;  // representative result goals per multiset
  bool truncated = false;                             // stopped at max_outcomes
  bool limit_hit = false;                             // a step or choice-depth limit cut the search short
  std::size_t steps = 0;
};

/// Runs the strategy to completion on every branch of its choice tree
/// (breakpoints ignored) and collects the distinct result multisets.
OutcomeSet enumerate_outcomes(const GraphDocument& d, const std::vector<Goal>& goals, EvalLimits limits = {},
                              const TacticRegistry& reg = builtin_registry(), std::size_t max_outcomes = 1000);

struct BruteForceOptions {
  std::size_t max_depth = 8;  // tactic applications along any path
  std::vector<std::string> tactics;  // empty: every registered tactic
  std::size_t max_states = 200000;
};

struct BruteForceResult {
  std::map<GoalMultiset, std::size_t> reachable;  // multiset -> applications needed to reach it
  bool truncated = false;                        // stopped at max_states
};

/// Breadth-first closure of the initial goal multiset under "replace one goal
/// by the subgoals of one alternative of one tactic", deduplicated by alpha class.
BruteForceResult brute_force_outcomes(const std::vector<Goal>& goals, const BruteForceOptions& opts = {},
                                      const TacticRegistry& reg = builtin_registry());

/// Tactic names used by atomic nodes anywhere in the document, sorted.
std::vector<std::string> tactics_used(const GraphDocument& d);

}  // namespace psg
