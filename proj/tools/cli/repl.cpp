#include "repl.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

namespace psg::cli {

namespace {

std::string goal_list(const std::vector<Goal>& goals) {
  if (goals.empty()) return "QED";
  std::string out = std::to_string(goals.size()) + (goals.size() == 1 ? " goal:" : " goals:");
  if (goals.size() == 1) return out + " " + pretty(goals.front());
  for (const Goal& g : goals) out += "\n  " + pretty(g);
  return out;
}

}  // namespace

std::string describe(const EvalSession& s) {
  std::ostringstream out;
  switch (s.status()) {
    case Status::Complete: out << "complete: " << goal_list(s.results()) << "\n"; return out.str();
    case Status::Failed: out << "failed: " << (s.failure() ? s.failure()->str() : "") << "\n"; return out.str();
    case Status::PausedAtBreakpoint: out << "paused at breakpoint on " << s.next_goal()->first; break;
    case Status::Running: out << "running"; break;
  }
  out << " (steps " << s.steps() << ", choices " << s.choice_depth() << ")\n";
  std::string path;
  for (const Frame& f : s.frames()) path += (path.empty() ? "" : " > ") + f.graph;
  out << "frame " << path << "\n";
  auto next = s.next_goal();
  for (const auto& [wire, goals] : s.frames().back().occupancy) {
    for (const Goal& g : goals) {
      bool is_next = next && next->second == g.id;
      out << (is_next ? "> " : "  ") << wire << ": " << g.id.str() << "  " << pretty(g) << "\n";
    }
  }
  return out.str();
}

const char* Repl::usage() {
  return "commands: goals | select <goal> | step | into | over | finish-node | finish | break <wire> | continue | "
         "back | trace <path> | quit";
}

bool Repl::execute(const std::string& line) {
  std::istringstream in(line);
  std::string cmd, arg, extra;
  in >> cmd >> arg >> extra;
  if (cmd.empty()) return true;
  bool needs_arg = cmd == "select" || cmd == "break" || cmd == "trace";
  if (needs_arg != !arg.empty() || !extra.empty()) {
    out_ << usage() << "\n";
    return true;
  }
  try {
    if (cmd == "quit" || cmd == "exit") return false;
    if (cmd == "goals") {
    } else if (cmd == "select") {
      s_.select_goal(GoalId::parse(arg));
    } else if (cmd == "step") {
      s_.step();
    } else if (cmd == "into") {
      s_.step_into();
    } else if (cmd == "over") {
      s_.step_over();
    } else if (cmd == "finish-node") {
      s_.finish_node();
    } else if (cmd == "finish") {
      s_.finish();
    } else if (cmd == "break") {
      s_.toggle_breakpoint(arg);
    } else if (cmd == "continue") {
      s_.run_to_breakpoint();
    } else if (cmd == "back") {
      if (s_.choice_depth() == 0) {
        out_ << "nothing to backtrack\n";
        return true;
      }
      s_.backtrack();
    } else if (cmd == "trace") {
      std::ofstream f(arg, std::ios::binary | std::ios::trunc);
      if (!f || !(f << export_trace(s_))) {
        out_ << "error: cannot write '" << arg << "'\n";
        return true;
      }
      out_ << "trace written to " << arg << "\n";
      return true;
    } else {
      out_ << usage() << "\n";
      return true;
    }
  } catch (const EngineError& e) {
    out_ << "error: " << e.what() << "\n";
    return true;
  } catch (const std::invalid_argument& e) {
    out_ << "error: " << e.what() << "\n";
    return true;
  }
  out_ << describe(s_);
  return true;
}

void Repl::run(std::istream& in, bool prompt) {
  out_ << describe(s_);
  std::string line;
  while (true) {
    if (prompt) out_ << "psg> " << std::flush;
    if (!std::getline(in, line)) break;
    if (!execute(line)) break;
  }
}

}  // namespace psg::cli
