// The `psg` command line: eval, step, lint and serve.
#pragma once

#include <iosfwd>

namespace psg::cli {

enum ExitCode : int { kOk = 0, kEvalFailed = 1, kUsage = 2, kLintErrors = 3 };

/// Entry point with injectable streams; returns the process exit code.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace psg::cli
