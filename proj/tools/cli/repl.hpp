// Line-oriented interactive stepping over one evaluation session.
#pragma once

#include <iosfwd>
#include <string>

#include "psg/engine.hpp"

namespace psg::cli {

/// Human-readable status line plus the occupancy of the innermost frame.
std::string describe(const EvalSession& s);

class Repl {
 public:
  Repl(EvalSession& session, std::ostream& out) : s_(session), out_(out) {}

  /// Runs one command line. Returns false once the user asked to quit.
  bool execute(const std::string& line);
  /// Reads commands until end of input or `quit`.
  void run(std::istream& in, bool prompt);

  static const char* usage();

 private:
  EvalSession& s_;
  std::ostream& out_;
};

}  // namespace psg::cli
