// Reference implementations the engine is checked against. They share no code
// with the engine beyond the tactic registry and goal-type evaluation.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "psg/graph.hpp"
#include "psg/prover.hpp"
#include "psg/search.hpp"

namespace psg::testing {

using Outcomes = std::set<GoalMultiset>;

/// Outcome multisets of running `goals` through an acyclic document, computed by
/// a recursive walk of every tactic alternative and routing choice per goal.
/// Throws std::runtime_error if the walk exceeds `max_calls` (cyclic input).
Outcomes recursive_outcomes(const GraphDocument& d, const std::vector<Goal>& goals,
                            const TacticRegistry& reg = builtin_registry(), std::size_t max_calls = 2000000);

/// Nesting cycle check by Kahn's topological sort over the graph-reference relation.
bool nesting_cycle_by_toposort(const GraphDocument& d);

}  // namespace psg::testing
