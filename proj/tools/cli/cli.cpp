#include "cli.hpp"

#include <unistd.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "psg/engine.hpp"
#include "psg/lint.hpp"
#include "psg/search.hpp"
#include "repl.hpp"
#include "report.hpp"
#include "server.hpp"

namespace psg::cli {

namespace {

constexpr std::size_t kMaxOutcomes = 1000;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string file;
  std::vector<std::string> goals;
  bool all = false;
  bool ignore_breakpoints = false;
  std::optional<std::size_t> max_steps;
  std::optional<std::size_t> max_choices;
  std::string trace;
  bool json = false;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string root = ".";
  std::string cors_origin;
};

EvalLimits limits_from(const Options& o) {
  EvalLimits l;
  if (const char* env = std::getenv("PSG_MAX_STEPS"); env && *env) {
    std::string_view text(env);
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || ptr != text.data() + text.size() || n == 0) {
      throw UsageError("PSG_MAX_STEPS must be a positive integer, got '" + std::string(text) + "'");
    }
    l.max_steps = n;
  }
  if (o.max_steps) l.max_steps = *o.max_steps;
  if (o.max_choices) l.max_choice_depth = *o.max_choices;
  return l;
}

std::vector<Goal> parse_goals(const std::vector<std::string>& texts) {
  std::vector<Goal> goals;
  for (const std::string& t : texts) {
    try {
      goals.push_back(parse_goal(t));
    } catch (const SyntaxError& e) {
      throw UsageError("cannot parse goal \"" + t + "\": " + e.what());
    }
  }
  return goals;
}

std::string goal_summary(const std::vector<Goal>& goals) {
  if (goals.empty()) return "QED";
  std::string out = std::to_string(goals.size()) + (goals.size() == 1 ? " goal:" : " goals:");
  if (goals.size() == 1) return out + " " + pretty(goals.front());
  for (const Goal& g : goals) out += "\n  " + pretty(g);
  return out;
}

std::vector<std::string> pretty_all(const std::vector<Goal>& goals) {
  std::vector<std::string> out;
  for (const Goal& g : goals) out.push_back(pretty(g));
  return out;
}

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& out) {
  for (const Diagnostic& d : diags) out << d.str() << "\n";
}

// Loads a document; on invariant violations prints them and returns the lint exit code.
std::optional<GraphDocument> load(const std::string& path, std::ostream& out, std::ostream& err, int& code) {
  try {
    return load_document_file(path);
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    code = kUsage;
  } catch (const LoadError& e) {
    if (e.kind() == LoadError::Kind::Invariant) {
      print_diagnostics(e.diagnostics(), out);
      code = kLintErrors;
    } else {
      err << "error: " << path << ": " << e.what() << "\n";
      code = kUsage;
    }
  }
  return std::nullopt;
}

FailureInfo failure_info(const FailureReport& f) {
  return {std::string(fail_reason_name(f.reason)), f.graph, f.node, f.goal_text, f.message};
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.all && !o.trace.empty()) throw UsageError("--trace cannot be combined with --all");
  EvalLimits limits = limits_from(o);
  std::vector<Goal> goals = parse_goals(o.goals);
  int code = kOk;
  auto doc = load(o.file, out, err, code);
  if (!doc) return code;
  try {
    if (o.all) {
      OutcomeSet set = enumerate_outcomes(*doc, goals, limits, builtin_registry(), kMaxOutcomes);
      EvalReport r;
      r.status = set.outcomes.empty() ? "failed" : "complete";
      r.steps = set.steps;
      r.outcomes.emplace();
      for (const auto& [key, results] : set.outcomes) r.outcomes->push_back(pretty_all(results));
      r.truncated = set.truncated;
      if (set.outcomes.empty()) {
        r.failure = FailureInfo{set.limit_hit ? "limit" : "exhausted", "", "", "", "no branch completed"};
      }
      if (o.json) {
        out << write_report(r);
      } else {
        out << set.outcomes.size() << (set.outcomes.size() == 1 ? " outcome" : " outcomes") << "\n";
        for (const auto& [key, results] : set.outcomes) out << "- " << goal_summary(results) << "\n";
        if (set.truncated) out << "(truncated at " << kMaxOutcomes << " outcomes)\n";
        if (set.limit_hit) out << "(search cut short by step or choice limits)\n";
      }
      return set.outcomes.empty() ? kEvalFailed : kOk;
    }

    EvalSession s = EvalSession::init(*doc, goals, {}, limits);
    s.finish(o.ignore_breakpoints);
    if (!o.trace.empty()) {
      std::ofstream f(o.trace, std::ios::binary | std::ios::trunc);
      if (!f || !(f << export_trace(s))) {
        err << "error: cannot write trace to '" << o.trace << "'\n";
        return kUsage;
      }
    }
    EvalReport r;
    r.status = std::string(status_name(s.status()));
    r.results = pretty_all(s.results());
    r.steps = s.steps();
    if (s.failure()) r.failure = failure_info(*s.failure());
    if (o.json) {
      out << write_report(r);
    } else if (s.status() == Status::Complete) {
      out << goal_summary(s.results()) << "\n";
    } else if (s.status() == Status::Failed) {
      out << "failed: " << s.failure()->str() << "\n";
    } else {
      out << describe(s);
    }
    return s.status() == Status::Failed ? kEvalFailed : kOk;
  } catch (const EngineError& e) {
    if (e.code() == EngineError::Code::LintFailed) {
      print_diagnostics(e.diagnostics(), out);
      return kLintErrors;
    }
    err << "error: " << e.what() << "\n";
    return kEvalFailed;
  }
}

int cmd_step(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  EvalLimits limits = limits_from(o);
  std::vector<Goal> goals = parse_goals(o.goals);
  int code = kOk;
  auto doc = load(o.file, out, err, code);
  if (!doc) return code;
  try {
    EvalSession s = EvalSession::init(*doc, goals, {GoalSelection::Manual}, limits);
    Repl repl(s, out);
    repl.run(in, &in == &std::cin && isatty(STDIN_FILENO));
    return s.status() == Status::Failed ? kEvalFailed : kOk;
  } catch (const EngineError& e) {
    if (e.code() == EngineError::Code::LintFailed) {
      print_diagnostics(e.diagnostics(), out);
      return kLintErrors;
    }
    err << "error: " << e.what() << "\n";
    return kEvalFailed;
  }
}

int cmd_lint(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<Diagnostic> diags;
  try {
    diags = lint(load_document_file(o.file), builtin_registry());
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const LoadError& e) {
    if (e.kind() != LoadError::Kind::Invariant) {
      err << "error: " << o.file << ": " << e.what() << "\n";
      return kUsage;
    }
    diags = e.diagnostics();
  }
  if (o.json) {
    nlohmann::json j = nlohmann::json::array();
    for (const Diagnostic& d : diags) {
      j.push_back({{"code", std::string(code_name(d.code))},
                   {"severity", d.severity() == Severity::Error ? "error" : "warning"},
                   {"message", d.message},
                   {"graph", d.graph},
                   {"location", d.location()}});
    }
    out << j.dump(2) << "\n";
  } else if (diags.empty()) {
    out << "no issues\n";
  } else {
    print_diagnostics(diags, out);
  }
  return has_errors(diags) ? kLintErrors : kOk;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  server::ServerOptions so;
  so.root = o.root;
  so.cors_origin = o.cors_origin;
  so.log = &out;
  server::SessionServer srv(so);
  if (!srv.bind(o.host, o.port)) {
    err << "error: cannot listen on " << o.host << ":" << o.port << "\n";
    return kUsage;
  }
  out << "serving " << o.root << " on http://" << o.host << ":" << srv.port() << std::endl;
  srv.run();
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graphical proof strategies: evaluate, step through, lint and serve PSGraph documents", "psg"};
  app.require_subcommand(1);
  Options o;

  auto add_goals = [&](CLI::App* sub) { sub->add_option("--goal", o.goals, "goal text, e.g. \"p, q |- p & q\"")->required(); };
  auto add_limits = [&](CLI::App* sub) {
    sub->add_option("--max-steps", o.max_steps, "step budget (default 10000 or $PSG_MAX_STEPS)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-choices", o.max_choices, "choice-point depth limit (default 256)")
        ->check(CLI::PositiveNumber);
  };

  auto* eval = app.add_subcommand("eval", "run a strategy to completion");
  eval->add_option("graph", o.file, "strategy document (.psg.json)")->required();
  add_goals(eval);
  eval->add_flag("--all", o.all, "enumerate every outcome (capped at 1000)");
  eval->add_flag("--ignore-breakpoints", o.ignore_breakpoints, "run through breakpoints");
  add_limits(eval);
  eval->add_option("--trace", o.trace, "write the evaluation trace to this file");
  eval->add_flag("--json", o.json, "machine-readable report");

  auto* step = app.add_subcommand("step", "step through a strategy interactively");
  step->add_option("graph", o.file, "strategy document (.psg.json)")->required();
  add_goals(step);
  add_limits(step);

  auto* lnt = app.add_subcommand("lint", "check a strategy document");
  lnt->add_option("graph", o.file, "strategy document (.psg.json)")->required();
  lnt->add_flag("--json", o.json, "machine-readable diagnostics");

  auto* serve = app.add_subcommand("serve", "start the session server");
  serve->add_option("--port", o.port, "port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "address to bind");
  serve->add_option("--root", o.root, "directory holding .psg.json documents");
  serve->add_option("--cors-origin", o.cors_origin, "allowed browser origin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'psg --help' for usage\n";
    return kUsage;
  }

  try {
    if (eval->parsed()) return cmd_eval(o, out, err);
    if (step->parsed()) return cmd_step(o, in, out, err);
    if (lnt->parsed()) return cmd_lint(o, out, err);
    return cmd_serve(o, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace psg::cli
