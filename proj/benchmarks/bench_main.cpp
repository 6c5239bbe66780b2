#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "psg/engine.hpp"
#include "psg/search.hpp"

namespace {

using namespace psg;

const std::string kRoot = PSG_SOURCE_DIR;
const char* kHeadline = "|- forall x. (p(x) -> p(x)) & (exists y. r(y) -> exists y. r(y))";

const GraphDocument& quant_elim() {
  static const GraphDocument d = load_document_file(kRoot + "/strategies/quant_elim.psg.json");
  return d;
}

std::vector<std::string> regression_goals() {
  std::ifstream in(kRoot + "/strategies/quant_elim.regression.txt");
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

void BM_ParseGoal(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_goal(kHeadline));
}
BENCHMARK(BM_ParseGoal);

void BM_PrettyGoal(benchmark::State& state) {
  Goal g = parse_goal(kHeadline);
  for (auto _ : state) benchmark::DoNotOptimize(pretty(g));
}
BENCHMARK(BM_PrettyGoal);

void BM_CanonicalKey(benchmark::State& state) {
  Goal g = parse_goal(kHeadline);
  for (auto _ : state) benchmark::DoNotOptimize(canonical_key(g));
}
BENCHMARK(BM_CanonicalKey);

void BM_GoalTypeEval(benchmark::State& state) {
  GoalType gt = parse_goaltype("!hyp_is(exists), concl_is(exists), num_hyps(le, 3)");
  Goal g = parse_goal("p(a), q(b) |- exists x. p(x) & q(x)");
  for (auto _ : state) benchmark::DoNotOptimize(eval_goaltype(gt, g));
}
BENCHMARK(BM_GoalTypeEval);

void BM_ApplyTactic(benchmark::State& state) {
  Goal g = parse_goal("p(a), q(b) |- exists x. p(x) & q(x)");
  for (auto _ : state) {
    GoalIdSource ids;
    benchmark::DoNotOptimize(apply_tactic(builtin_registry(), "exists_intro", g, ids));
  }
}
BENCHMARK(BM_ApplyTactic);

void BM_LoadDocument(benchmark::State& state) {
  std::string bytes = save_document(quant_elim());
  for (auto _ : state) benchmark::DoNotOptimize(load_document(bytes));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_LoadDocument);

void BM_SaveDocument(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(save_document(quant_elim()));
}
BENCHMARK(BM_SaveDocument);

void BM_FinishHeadline(benchmark::State& state) {
  std::vector<Goal> goals = {parse_goal(kHeadline)};
  for (auto _ : state) {
    EvalSession s = init_session(quant_elim(), goals);
    s.finish();
    benchmark::DoNotOptimize(s.status());
  }
}
BENCHMARK(BM_FinishHeadline);

void BM_RegressionSuite(benchmark::State& state) {
  std::vector<Goal> goals;
  for (const auto& t : regression_goals()) goals.push_back(parse_goal(t));
  for (auto _ : state) {
    for (const Goal& g : goals) {
      EvalSession s = init_session(quant_elim(), {g});
      s.finish();
      benchmark::DoNotOptimize(s.status());
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * goals.size()));
}
BENCHMARK(BM_RegressionSuite)->Unit(benchmark::kMillisecond);

void BM_EnumerateOutcomes(benchmark::State& state) {
  std::vector<Goal> goals = {parse_goal("|- forall x. (p(x) & q(x) -> exists y. q(y) & p(y))")};
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_outcomes(quant_elim(), goals).outcomes.size());
}
BENCHMARK(BM_EnumerateOutcomes)->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  std::vector<Goal> goals = {parse_goal(kHeadline)};
  BruteForceOptions opts;
  opts.max_depth = static_cast<std::size_t>(state.range(0));
  opts.tactics = tactics_used(quant_elim());
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_outcomes(goals, opts).reachable.size());
}
BENCHMARK(BM_BruteForce)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ExportReplay(benchmark::State& state) {
  std::vector<Goal> goals = {parse_goal(kHeadline)};
  EvalSession s = init_session(quant_elim(), goals);
  s.finish();
  std::string bytes = export_trace(s);
  for (auto _ : state) benchmark::DoNotOptimize(replay_trace(quant_elim(), goals, bytes).status());
}
BENCHMARK(BM_ExportReplay);

}  // namespace

BENCHMARK_MAIN();
