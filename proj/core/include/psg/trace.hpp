// Evaluation events and the .trace.json file format.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psg {

enum class EventKind {
  GoalEntered,        // initial goal placed on an input wire of main
  TacticApplied,      // node, goal, alternative, subgoals
  TacticFailed,       // node, goal: the tactic produced no alternatives
  Passed,             // node, goal: identity (or ignored breakpoint) consumed the goal
  Routed,             // goal, wire
  GoalExited,         // goal, wire, out: left its frame through an output boundary
  EnteredNested,      // node, goal
  ExitedNested,       // node
  BreakpointHit,      // node, wire, goal
  Resumed,            // node, goal: goal released past the breakpoint it was held at
  Backtracked,        // choice, option, forced
  BreakpointToggled,  // graph, wire, inserted
  Finished,           // status, results, reason
};

std::string_view event_kind_name(EventKind k);
std::optional<EventKind> event_kind_from_name(std::string_view name);

struct TraceEvent {
  EventKind kind = EventKind::Routed;
  std::string node;
  std::string wire;
  std::string graph;
  std::string goal;  // goal id, "g<n>"
  std::optional<std::size_t> index;  // alternative / option / output boundary
  std::vector<std::string> goals;    // subgoal ids, or result ids for Finished
  std::string detail;                // choice kind, finished status
  std::string reason;                // failure reason for Finished
  bool flag = false;                 // forced (Backtracked) / inserted (BreakpointToggled)

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

std::string to_json_text(const TraceEvent& e);

struct TraceLimits {
  std::size_t max_steps = 0;
  std::size_t max_choice_depth = 0;
};

/// Contents of a .trace.json file.
struct TraceFile {
  std::string doc_hash;
  std::vector<std::string> goals;  // initial goals, pretty-printed
  TraceLimits limits;
  std::vector<TraceEvent> events;
};

std::string write_trace(const TraceFile& t);
/// Throws std::invalid_argument on malformed input.
TraceFile read_trace(std::string_view bytes);

}  // namespace psg
