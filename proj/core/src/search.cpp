#include "psg/search.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace psg {

GoalMultiset multiset_of(const std::vector<Goal>& goals) {
  GoalMultiset out;
  out.reserve(goals.size());
  for (const Goal& g : goals) out.push_back(canonical_key(g));
  std::sort(out.begin(), out.end());
  return out;
}

OutcomeSet enumerate_outcomes(const GraphDocument& d, const std::vector<Goal>& goals, EvalLimits limits,
                              const TacticRegistry& reg, std::size_t max_outcomes) {
  OutcomeSet out;
  EvalSession s = EvalSession::init(d, goals, {}, limits, reg);
  while (true) {
    if (s.status() == Status::Running || s.status() == Status::PausedAtBreakpoint) s.finish(true);
    if (s.status() == Status::Complete) {
      out.outcomes.emplace(multiset_of(s.results()), s.results());
      if (out.outcomes.size() >= max_outcomes) {
        out.truncated = s.choice_depth() > 0;
        break;
      }
    } else if (s.status() == Status::Failed && s.failure() && s.failure()->reason != FailReason::Exhausted) {
      out.limit_hit = true;
      break;
    }
    if (s.choice_depth() == 0) break;
    s.backtrack();
  }
  out.steps = s.steps();
  return out;
}

BruteForceResult brute_force_outcomes(const std::vector<Goal>& goals, const BruteForceOptions& opts,
                                      const TacticRegistry& reg) {
  std::vector<std::string> tactics = opts.tactics.empty() ? reg.names() : opts.tactics;
  BruteForceResult out;
  GoalIdSource ids;
  std::deque<std::pair<std::vector<Goal>, std::size_t>> queue;
  out.reachable.emplace(multiset_of(goals), 0);
  queue.emplace_back(goals, 0);
  while (!queue.empty()) {
    auto [state, depth] = std::move(queue.front());
    queue.pop_front();
    if (depth >= opts.max_depth) continue;
    // Goals with the same alpha class expand identically; expand one of each.
    std::set<std::string> seen;
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (!seen.insert(canonical_key(state[i])).second) continue;
      for (const std::string& t : tactics) {
        for (Alternative& alt : apply_tactic(reg, t, state[i], ids)) {
          std::vector<Goal> next;
          next.reserve(state.size() - 1 + alt.subgoals.size());
          for (std::size_t j = 0; j < state.size(); ++j) {
            if (j != i) next.push_back(state[j]);
          }
          for (Goal& g : alt.subgoals) next.push_back(std::move(g));
          if (!out.reachable.emplace(multiset_of(next), depth + 1).second) continue;
          if (out.reachable.size() >= opts.max_states) {
            out.truncated = true;
            return out;
          }
          queue.emplace_back(std::move(next), depth + 1);
        }
      }
    }
  }
  return out;
}

std::vector<std::string> tactics_used(const GraphDocument& d) {
  std::set<std::string> names;
  for (const auto& [gname, g] : d.graphs) {
    for (const auto& [nname, kind] : g.nodes) {
      if (const auto* a = std::get_if<AtomicNode>(&kind)) names.insert(a->tactic);
    }
  }
  return {names.begin(), names.end()};
}

}  // namespace psg
