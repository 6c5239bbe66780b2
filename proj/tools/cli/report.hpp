// Machine-readable result of `psg eval --json`.
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace psg::cli {

struct FailureInfo {
  std::string reason;
  std::string graph;
  std::string node;
  std::string goal;
  std::string message;

  friend bool operator==(const FailureInfo&, const FailureInfo&) = default;
};

struct EvalReport {
  std::string status;                // "complete" | "failed" | "paused"
  std::vector<std::string> results;  // pretty-printed result goals
  std::optional<FailureInfo> failure;
  std::size_t steps = 0;
  // Only with --all: every outcome as pretty-printed goals, ordered by alpha-class key.
  std::optional<std::vector<std::vector<std::string>>> outcomes;
  bool truncated = false;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

std::string write_report(const EvalReport& r);
/// Throws std::invalid_argument on malformed input.
EvalReport parse_report(std::string_view text);

}  // namespace psg::cli
