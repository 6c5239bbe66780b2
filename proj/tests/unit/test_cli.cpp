#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "psg/engine.hpp"
#include "repl.hpp"
#include "report.hpp"
#include "server.hpp"

namespace psg::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "psg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

std::string strategy(const std::string& name) { return std::string(PSG_SOURCE_DIR) + "/strategies/" + name; }

const char* kHeadline = "|- forall x. (p(x) -> p(x)) & (exists y. r(y) -> exists y. r(y))";

// A chain of identity nodes; wires w0..w3.
const char* kChain = R"({"main":"g","graphs":{"g":{"n_inputs":1,"n_outputs":1,
  "nodes":{"a":{"k":"identity"},"b":{"k":"identity"},"c":{"k":"identity"}},
  "wires":[{"id":"w0","src":{"in":0},"dst":{"node":"a"},"gt":"any"},
           {"id":"w1","src":{"node":"a"},"dst":{"node":"b"},"gt":"any"},
           {"id":"w2","src":{"node":"b"},"dst":{"node":"c"},"gt":"any"},
           {"id":"w3","src":{"node":"c"},"dst":{"out":0},"gt":"any"}]}}})";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("psg_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    ::unsetenv("PSG_MAX_STEPS");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    ::unsetenv("PSG_MAX_STEPS");
  }
  std::string write(const std::string& name, const std::string& text) {
    fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string read(const std::string& path) {
    std::ifstream f(path);
    return std::string(std::istreambuf_iterator<char>(f), {});
  }
  fs::path dir_;
};

TEST_F(CliTest, EvalIdentity) {
  Result r = run_cli({"eval", strategy("identity.psg.json"), "--goal", "|- p"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "1 goal: |- p\n");
}

TEST_F(CliTest, EvalQuantElimHeadline) {
  Result r = run_cli({"eval", strategy("quant_elim.psg.json"), "--goal", kHeadline});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "QED\n");
}

TEST_F(CliTest, EvalMissingFileIsAnIoError) {
  Result r = run_cli({"eval", (dir_ / "missing.psg.json").string(), "--goal", "|- p"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("missing.psg.json"), std::string::npos);
}

TEST_F(CliTest, EvalFailureExitsOneAndNamesTheNode) {
  Result r = run_cli({"eval", strategy("quant_elim.psg.json"), "--goal", "|- p"});
  EXPECT_EQ(r.code, kEvalFailed);
  EXPECT_EQ(r.out.rfind("failed: exhausted", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("node '"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kUsage);
  EXPECT_EQ(run_cli({"eval", strategy("identity.psg.json")}).code, kUsage);  // --goal is required
  Result bad_goal = run_cli({"eval", strategy("identity.psg.json"), "--goal", "|- p &"});
  EXPECT_EQ(bad_goal.code, kUsage);
  EXPECT_NE(bad_goal.err.find("offset"), std::string::npos);
  EXPECT_EQ(run_cli({"eval", strategy("identity.psg.json"), "--goal", "|- p", "--all", "--trace", "t"}).code, kUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kOk);
}

TEST_F(CliTest, MultipleGoals) {
  Result r = run_cli({"eval", strategy("identity.psg.json"), "--goal", "|- p", "--goal", "q |- r"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "2 goals:\n  |- p\n  q |- r\n");
}

TEST_F(CliTest, MaxStepsFromEnvironmentAndFlag) {
  std::string loop = write("loop.psg.json", R"({"main":"g","graphs":{"g":{"n_inputs":1,"n_outputs":1,
    "nodes":{"l":{"k":"identity"}},"wires":[{"id":"w0","src":{"in":0},"dst":{"node":"l"},"gt":"any"},
    {"id":"w1","src":{"node":"l"},"dst":{"node":"l"},"gt":"any"}]}}})");
  ::setenv("PSG_MAX_STEPS", "7", 1);
  Result r = run_cli({"eval", loop, "--goal", "|- p", "--json"});
  EXPECT_EQ(r.code, kEvalFailed);
  EvalReport rep = parse_report(r.out);
  EXPECT_EQ(rep.steps, 7u);
  ASSERT_TRUE(rep.failure);
  EXPECT_EQ(rep.failure->reason, "step_limit_exceeded");
  // The flag wins over the environment.
  EXPECT_EQ(parse_report(run_cli({"eval", loop, "--goal", "|- p", "--json", "--max-steps", "3"}).out).steps, 3u);
  ::setenv("PSG_MAX_STEPS", "lots", 1);
  EXPECT_EQ(run_cli({"eval", loop, "--goal", "|- p"}).code, kUsage);
}

TEST_F(CliTest, EvalAllEnumeratesOutcomes) {
  std::string d = write("disj.psg.json", R"({"main":"g","graphs":{"g":{"n_inputs":1,"n_outputs":1,
    "nodes":{"t":{"k":"atomic","tactic":"disj_intro"}},"wires":[{"id":"w0","src":{"in":0},"dst":{"node":"t"},"gt":"any"},
    {"id":"w1","src":{"node":"t"},"dst":{"out":0},"gt":"any"}]}}})");
  Result r = run_cli({"eval", d, "--goal", "|- p | q", "--all"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "2 outcomes\n- 1 goal: |- p\n- 1 goal: |- q\n");
  EvalReport rep = parse_report(run_cli({"eval", d, "--goal", "|- p | q", "--all", "--json"}).out);
  ASSERT_TRUE(rep.outcomes);
  EXPECT_EQ(*rep.outcomes, (std::vector<std::vector<std::string>>{{"|- p"}, {"|- q"}}));
  EXPECT_FALSE(rep.truncated);
}

TEST_F(CliTest, EvalAllTruncatesAtOneThousand) {
  // Ten goals, each with two alternatives: 1024 outcomes.
  std::string d = write("disj.psg.json", R"({"main":"g","graphs":{"g":{"n_inputs":1,"n_outputs":1,
    "nodes":{"t":{"k":"atomic","tactic":"disj_intro"}},"wires":[{"id":"w0","src":{"in":0},"dst":{"node":"t"},"gt":"any"},
    {"id":"w1","src":{"node":"t"},"dst":{"out":0},"gt":"any"}]}}})");
  std::vector<std::string> args = {"eval", d, "--all", "--max-steps", "1000000"};
  for (int i = 0; i < 10; ++i) {
    args.push_back("--goal");
    args.push_back("|- a" + std::to_string(i) + " | b" + std::to_string(i));
  }
  Result r = run_cli(args);
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out.rfind("1000 outcomes\n", 0), 0u);
  EXPECT_NE(r.out.find("(truncated at 1000 outcomes)"), std::string::npos);
}

TEST_F(CliTest, JsonReportRoundTrips) {
  Result r = run_cli({"eval", strategy("identity.psg.json"), "--goal", "|- p", "--json"});
  EvalReport rep = parse_report(r.out);
  EXPECT_EQ(rep.status, "complete");
  EXPECT_EQ(rep.results, std::vector<std::string>{"|- p"});
  EXPECT_EQ(write_report(rep), r.out);

  EvalReport failed{"failed", {}, FailureInfo{"exhausted", "g", "n", "|- p", "no alternatives"}, 12, std::nullopt, false};
  EXPECT_EQ(parse_report(write_report(failed)), failed);
  EvalReport all{"complete", {}, std::nullopt, 3, std::vector<std::vector<std::string>>{{}, {"|- q"}}, true};
  EXPECT_EQ(parse_report(write_report(all)), all);
  EXPECT_THROW(parse_report("{}"), std::invalid_argument);
  EXPECT_THROW(parse_report("not json"), std::invalid_argument);
}

TEST_F(CliTest, TraceFlagWritesAReplayableTrace) {
  std::string path = (dir_ / "run.trace.json").string();
  Result r = run_cli({"eval", strategy("quant_elim.psg.json"), "--goal", kHeadline, "--trace", path});
  EXPECT_EQ(r.code, kOk);
  GraphDocument d = load_document_file(strategy("quant_elim.psg.json"));
  EvalSession s = replay_trace(d, {parse_goal(kHeadline)}, read(path));
  EXPECT_EQ(s.status(), Status::Complete);
  EXPECT_EQ(export_trace(s), read(path));
}

TEST_F(CliTest, LintExitCodes) {
  Result clean = run_cli({"lint", strategy("quant_elim.psg.json")});
  EXPECT_EQ(clean.code, kOk);
  EXPECT_EQ(clean.out, "no issues\n");

  std::string bad = write("bad.psg.json", R"({"main":"g","graphs":{"g":{"n_inputs":1,"n_outputs":1,
    "nodes":{"t":{"k":"atomic","tactic":"no_such_tac"}},"wires":[{"id":"w0","src":{"in":0},"dst":{"node":"t"},"gt":"any"},
    {"id":"w1","src":{"node":"t"},"dst":{"out":0},"gt":"any"}]}}})");
  Result r = run_cli({"lint", bad});
  EXPECT_EQ(r.code, kLintErrors);
  EXPECT_NE(r.out.find("E001"), std::string::npos);
  EXPECT_NE(r.out.find("no_such_tac"), std::string::npos);
  EXPECT_EQ(run_cli({"eval", bad, "--goal", "|- p"}).code, kLintErrors);

  Result json = run_cli({"lint", bad, "--json"});
  EXPECT_EQ(json.code, kLintErrors);
  EXPECT_NE(json.out.find("\"E001\""), std::string::npos);

  EXPECT_EQ(run_cli({"lint", write("broken.psg.json", "{ nope")}).code, kUsage);
  EXPECT_EQ(run_cli({"lint", (dir_ / "absent.psg.json").string()}).code, kUsage);
}

TEST_F(CliTest, LintWarningsDoNotFail) {
  std::string warn = write("warn.psg.json", R"J({"main":"g","graphs":{"g":{"n_inputs":1,"n_outputs":1,"nodes":{},
    "wires":[{"id":"w0","src":{"in":0},"dst":{"out":0},"gt":"num_hyps(le, 0), num_hyps(ge, 1)"}]}}})J");
  Result r = run_cli({"lint", warn});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("W001"), std::string::npos);
}

TEST_F(CliTest, StepReplCompletes) {
  Result r = run_cli({"step", strategy("identity.psg.json"), "--goal", "|- p"}, "step\n");
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("complete: 1 goal: |- p"), std::string::npos);
}

TEST_F(CliTest, StepReplBreakAndContinue) {
  Result r = run_cli({"step", write("chain.psg.json", kChain), "--goal", "|- p"}, "break w3\ncontinue\n");
  EXPECT_NE(r.out.find("paused at breakpoint on w3"), std::string::npos) << r.out;
}

TEST_F(CliTest, StepReplExitCodeFollowsFinalStatus) {
  Result r = run_cli({"step", strategy("quant_elim.psg.json"), "--goal", "|- p"}, "finish\n");
  EXPECT_EQ(r.code, kEvalFailed);
  EXPECT_EQ(run_cli({"step", strategy("identity.psg.json"), "--goal", "|- p"}, "quit\n").code, kOk);
}

TEST(Repl, BackWithEmptyChoiceStack) {
  GraphDocument d = load_document_file(strategy("identity.psg.json"));
  EvalSession s = init_session(d, {parse_goal("|- p")});
  std::ostringstream out;
  Repl repl(s, out);
  std::string before = export_trace(s);
  EXPECT_TRUE(repl.execute("back"));
  EXPECT_NE(out.str().find("nothing to backtrack"), std::string::npos);
  EXPECT_EQ(export_trace(s), before);
}

TEST(Repl, UnknownCommandPrintsUsageAndKeepsState) {
  GraphDocument d = load_document_file(strategy("identity.psg.json"));
  EvalSession s = init_session(d, {parse_goal("|- p")});
  std::ostringstream out;
  Repl repl(s, out);
  std::string before = export_trace(s);
  EXPECT_TRUE(repl.execute("dance"));
  EXPECT_TRUE(repl.execute("select"));
  EXPECT_NE(out.str().find(Repl::usage()), std::string::npos);
  EXPECT_EQ(export_trace(s), before);
  EXPECT_FALSE(repl.execute("quit"));
}

TEST(Repl, ReportsEngineErrorsWithoutChangingState) {
  GraphDocument d = load_document_file(strategy("identity.psg.json"));
  EvalSession s = init_session(d, {parse_goal("|- p")});
  std::ostringstream out;
  Repl repl(s, out);
  std::string before = export_trace(s);
  repl.execute("into");
  repl.execute("select g9");
  repl.execute("break nowhere");
  EXPECT_EQ(export_trace(s), before);
  EXPECT_NE(out.str().find("g9"), std::string::npos);
}

TEST_F(CliTest, ReplScriptTraceMatchesTheApi) {
  GraphDocument d = load_document_file(strategy("quant_elim.psg.json"));
  std::vector<Goal> goals = {parse_goal("|- forall x. (p(x) -> p(x))"), parse_goal("|- exists x. (p(a) & q(b) -> q(x))")};
  std::string path = (dir_ / "repl.trace.json").string();

  EvalSession via_repl = init_session(d, goals, {GoalSelection::Manual});
  std::ostringstream out;
  Repl repl(via_repl, out);
  for (const char* line : {"goals", "select g0", "step", "select g2", "into", "step", "finish-node", "break w05", "continue", "back",
                           "finish"}) {
    repl.execute(line);
  }
  repl.execute("trace " + path);

  EvalSession direct = init_session(d, goals, {GoalSelection::Manual});
  direct.select_goal(GoalId{0});
  direct.step();
  direct.select_goal(GoalId{2});
  direct.step_into();
  direct.step();
  direct.finish_node();
  direct.toggle_breakpoint("w05");
  direct.run_to_breakpoint();
  direct.backtrack();
  direct.finish();
  EXPECT_EQ(direct.status(), Status::PausedAtBreakpoint);
  EXPECT_EQ(read(path), export_trace(direct));
  EXPECT_EQ(replay_trace(d, goals, read(path)).status(), direct.status());
}

TEST_F(CliTest, ServeOnOccupiedPortExitsTwo) {
  server::SessionServer holder(server::ServerOptions{});
  ASSERT_TRUE(holder.bind("127.0.0.1", 0));
  Result r = run_cli({"serve", "--port", std::to_string(holder.port()), "--root", dir_.string()});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("cannot listen"), std::string::npos);
  EXPECT_EQ(run_cli({"serve", "--port", "70000"}).code, kUsage);
}

}  // namespace
}  // namespace psg::cli
