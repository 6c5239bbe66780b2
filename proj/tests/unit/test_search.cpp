#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracle.hpp"
#include "psg/engine.hpp"
#include "psg/lint.hpp"
#include "psg/search.hpp"

namespace psg {
namespace {

using testing::DocShape;
using testing::Rng;

std::size_t goal_count(const EvalSession& s) {
  std::size_t n = s.results().size();
  for (const Frame& f : s.frames()) n += f.goal_count();
  return n;
}

DocShape strategy_like(bool cycles, bool nested) {
  DocShape shape;
  shape.tactics = {"conj_intro", "imp_intro", "disj_intro", "disj_elim", "conj_elim",
                   "assumption", "true_intro", "false_elim", "strip_conj"};
  shape.identity_weight = 2;
  shape.guard_probability = 0.7;
  shape.allow_cycles = cycles;
  shape.allow_nested = nested;
  return shape;
}

TEST(GoalAccounting, EachStepMatchesItsTraceEvents) {
  Rng rng(11);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    GraphDocument d = testing::random_document(rng, strategy_like(i % 2, i % 3 == 0));
    std::vector<Goal> goals = {testing::random_prop_goal(rng, 3)};
    std::optional<EvalSession> s;
    try {
      s.emplace(init_session(d, goals, {}, {300, 64}));
    } catch (const EngineError&) {
      continue;
    }
    while (s->status() == Status::Running) {
      std::size_t before = goal_count(*s), from = s->trace().size();
      s->step();
      if (s->status() == Status::Failed) break;
      bool backtracked = false;
      long expected = static_cast<long>(before);
      for (std::size_t k = from; k < s->trace().size(); ++k) {
        const TraceEvent& e = s->trace()[k];
        if (e.kind == EventKind::Backtracked) backtracked = true;
        if (e.kind == EventKind::TacticApplied) expected += static_cast<long>(e.goals.size()) - 1;
      }
      if (backtracked) continue;  // the branch was replaced by a snapshot
      ASSERT_EQ(static_cast<long>(goal_count(*s)), expected) << save_document(d);
      ++checked;
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(EnumerateOutcomes, MatchesOracleOnSmallDocuments) {
  Rng rng(12);
  int productive = 0;
  for (int i = 0; i < 300; ++i) {
    GraphDocument d = testing::random_document(rng, strategy_like(false, i % 4 == 0));
    if (has_errors(lint(d, builtin_registry()))) continue;
    std::vector<Goal> goals = {testing::random_prop_goal(rng, 3)};
    OutcomeSet got;
    try {
      got = enumerate_outcomes(d, goals, {100000, 256}, builtin_registry(), 100000);
    } catch (const EngineError&) {
      continue;
    }
    testing::Outcomes have;
    for (const auto& [k, v] : got.outcomes) have.insert(k);
    ASSERT_EQ(have, testing::recursive_outcomes(d, goals)) << save_document(d);
    productive += !have.empty();
  }
  EXPECT_GT(productive, 20);
}

TEST(EnumerateOutcomes, OutcomesAreReachableByBruteForce) {
  Rng rng(13);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    GraphDocument d = testing::random_document(rng, strategy_like(false, false));
    std::vector<Goal> goals = {testing::random_prop_goal(rng, 2)};
    OutcomeSet got;
    try {
      got = enumerate_outcomes(d, goals);
    } catch (const EngineError&) {
      continue;
    }
    if (got.outcomes.empty()) continue;
    BruteForceOptions opts;
    opts.max_depth = 10;
    opts.tactics = tactics_used(d);
    BruteForceResult reach = brute_force_outcomes(goals, opts);
    if (reach.truncated) continue;
    for (const auto& [key, results] : got.outcomes) {
      EXPECT_TRUE(reach.reachable.count(key)) << save_document(d) << pretty(goals[0]);
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(EnumerateOutcomes, IsDeterministic) {
  GraphDocument d = load_document_file(std::string(PSG_SOURCE_DIR) + "/strategies/quant_elim.psg.json");
  std::vector<Goal> goals = {parse_goal("|- forall x. (p(x) & q(x) -> exists y. q(y) & p(y))")};
  OutcomeSet a = enumerate_outcomes(d, goals), b = enumerate_outcomes(d, goals);
  EXPECT_EQ(a.outcomes.size(), b.outcomes.size());
  EXPECT_EQ(a.steps, b.steps);
  for (auto ia = a.outcomes.begin(), ib = b.outcomes.begin(); ia != a.outcomes.end(); ++ia, ++ib) {
    EXPECT_EQ(ia->first, ib->first);
  }
}

GraphDocument loop_doc(const std::string& loop_wire, const std::string& exit_wire) {
  return load_document(R"({"main":"g","graphs":{"g":{"n_inputs":1,"n_outputs":1,"nodes":{"l":{"k":"identity"}},
    "wires":[{"id":"w0","src":{"in":0},"dst":{"node":"l"},"gt":"any"},
             {"id":")" + loop_wire + R"(","src":{"node":"l"},"dst":{"node":"l"},"gt":"any"},
             {"id":")" + exit_wire + R"(","src":{"node":"l"},"dst":{"out":0},"gt":"any"}]}}})");
}

TEST(EnumerateOutcomes, ReportsLimitsOnLoops) {
  // Lowest wire id first: the loop is tried before the exit and exhausts the choice depth.
  OutcomeSet loop_first = enumerate_outcomes(loop_doc("w1", "w2"), {parse_goal("|- p")}, {200, 16});
  EXPECT_TRUE(loop_first.limit_hit);
  EXPECT_TRUE(loop_first.outcomes.empty());

  OutcomeSet exit_first = enumerate_outcomes(loop_doc("w2", "w1"), {parse_goal("|- p")}, {200, 16});
  EXPECT_TRUE(exit_first.limit_hit);
  EXPECT_EQ(exit_first.outcomes.size(), 1u);
}

TEST(Limits, TerminationAtTheBoundary) {
  Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    DocShape shape = strategy_like(true, i % 2);
    GraphDocument d = testing::random_document(rng, shape);
    std::vector<Goal> goals = {testing::random_prop_goal(rng, 3)};
    EvalLimits limits{1 + static_cast<std::size_t>(rng() % 40), 1 + static_cast<std::size_t>(rng() % 6)};
    try {
      EvalSession s = init_session(d, goals, {}, limits);
      s.finish(true);
      EXPECT_NE(s.status(), Status::Running);
      EXPECT_LE(s.steps(), limits.max_steps);
      EXPECT_LE(s.choice_depth(), limits.max_choice_depth);
    } catch (const EngineError&) {
    }
  }
}

TEST(TacticsUsed, CollectsAcrossGraphs) {
  GraphDocument d = load_document_file(std::string(PSG_SOURCE_DIR) + "/strategies/quant_elim.psg.json");
  auto used = tactics_used(d);
  EXPECT_TRUE(std::is_sorted(used.begin(), used.end()));
  EXPECT_NE(std::find(used.begin(), used.end(), "strip_conj"), used.end());
  EXPECT_NE(std::find(used.begin(), used.end(), "exists_intro"), used.end());
  EXPECT_NE(std::find(used.begin(), used.end(), "all_intro"), used.end());
}

TEST(MultisetOf, IgnoresOrderAndBoundNames) {
  EXPECT_EQ(multiset_of({parse_goal("|- p"), parse_goal("|- forall x. q(x)")}),
            multiset_of({parse_goal("|- forall y. q(y)"), parse_goal("|- p")}));
  EXPECT_NE(multiset_of({parse_goal("|- p")}), multiset_of({parse_goal("|- p"), parse_goal("|- p")}));
}

}  // namespace
}  // namespace psg
