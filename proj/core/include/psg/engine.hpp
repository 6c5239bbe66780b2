// PSGraph evaluation: goal routing, stepping, hierarchy, breakpoints and
// deterministic backtracking over tactic alternatives and routing choices.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "psg/graph.hpp"
#include "psg/prover.hpp"
#include "psg/trace.hpp"

namespace psg {

enum class GoalSelection { FifoByWireId, Manual };

struct EvalPolicy {
  /// Manual: a bare step() needs a selected goal whenever the frame holds more
  /// than one. Automatic runs (finish, step over, ...) always fall back to FIFO.
  GoalSelection goal_selection = GoalSelection::FifoByWireId;
};

struct EvalLimits {
  std::size_t max_steps = 10000;  // atomic steps per session, backtracked work included
  std::size_t max_choice_depth = 256;
};

enum class Status { Running, PausedAtBreakpoint, Complete, Failed };
enum class FailReason { Exhausted, StepLimitExceeded, ChoiceDepthExceeded };

std::string_view status_name(Status s);
std::string_view fail_reason_name(FailReason r);

struct FailureReport {
  FailReason reason = FailReason::Exhausted;
  std::string graph;
  std::string node;
  GoalId goal;
  std::string goal_text;
  std::string message;
  std::size_t depth = 0;  // choice-stack depth when the failure happened

  std::string str() const;
};

struct Frame {
  std::string graph;
  std::map<std::string, std::vector<Goal>> occupancy;  // wire id -> goals in arrival order; no empty entries
  std::optional<std::string> via_node;  // Nested node in the parent frame; empty for the top level

  std::size_t goal_count() const;
  const Goal* find(GoalId id, std::string* wire = nullptr) const;
};

enum class ChoiceKind { TacticAlternative, RoutingAssignment };
std::string_view choice_kind_name(ChoiceKind k);

class EngineError : public std::runtime_error {
 public:
  enum class Code {
    LintFailed,
    NoMatchingInputWire,
    NotAtNestedNode,
    AtTopLevel,
    UnknownGoal,
    UnknownWire,
    InvalidStatus,
    NoGoalSelected,
    NothingToBacktrack,
    TraceMismatch,
  };

  EngineError(Code code, const std::string& message, std::vector<Diagnostic> diags = {},
              std::optional<std::size_t> event_index = std::nullopt)
      : std::runtime_error(message), code_(code), diags_(std::move(diags)), event_index_(event_index) {}

  Code code() const { return code_; }
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }
  /// First divergent event (TraceMismatch).
  std::optional<std::size_t> event_index() const { return event_index_; }

 private:
  Code code_;
  std::vector<Diagnostic> diags_;
  std::optional<std::size_t> event_index_;
};

std::string_view error_code_name(EngineError::Code c);

/// A live evaluation. Copyable: a copy is an independent session (same trace so far).
/// The tactic registry must outlive the session.
class EvalSession {
 public:
  static EvalSession init(const GraphDocument& d, std::vector<Goal> goals, EvalPolicy policy = {},
                          EvalLimits limits = {}, const TacticRegistry& reg = builtin_registry());

  /// One atomic step on the selected (or FIFO-first) goal; nested nodes are stepped over.
  void step();
  void step_into();
  void step_over();
  /// Runs the innermost nested frame to completion and returns to its parent.
  void finish_node();
  void finish(bool ignore_breakpoints = false);
  void run_to_breakpoint();
  void select_goal(GoalId id);
  void toggle_breakpoint(const std::string& wire);
  /// Abandons the current branch and resumes from the most recent choice point.
  void backtrack();

  Status status() const { return status_; }
  const std::optional<FailureReport>& failure() const { return failure_; }
  const std::vector<Frame>& frames() const { return state_.frames; }
  const std::vector<Goal>& results() const { return state_.results; }
  std::optional<GoalId> selected_goal() const { return selected_; }
  std::size_t choice_depth() const { return choices_.size(); }
  std::size_t steps() const { return steps_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  const GraphDocument& document() const { return doc_; }
  const std::string& document_hash() const { return doc_hash_; }
  const EvalLimits& limits() const { return limits_; }
  const EvalPolicy& policy() const { return policy_; }
  const std::vector<Goal>& initial_goals() const { return initial_goals_; }
  /// Graph of the innermost frame (main once evaluation is over).
  const PSGraph& current_graph() const;

  /// Goal and wire the next step() would act on, if any.
  std::optional<std::pair<std::string, GoalId>> next_goal() const;
  /// True when the next step() faces a nested node.
  bool at_nested_node() const;

  /// Goals sitting on wires whose goal type they do not satisfy (always empty
  /// unless the engine is broken). Debug builds assert on this after every step.
  std::vector<std::string> routing_violations() const;

 private:
  struct Placement {
    Goal goal;
    std::vector<std::string> candidates;
    std::size_t frame = 0;
  };

  struct State {
    std::vector<Frame> frames;
    std::vector<Goal> results;
  };

  struct ChoicePoint {
    ChoiceKind kind = ChoiceKind::TacticAlternative;
    State snapshot;
    std::size_t next = 1;
    // TacticAlternative
    std::string node;
    std::size_t frame = 0;
    Goal goal;
    std::vector<Alternative> alternatives;
    // RoutingAssignment: pending.front() is being decided; the rest are placed afterwards.
    std::vector<Placement> pending;
    EventKind route_event = EventKind::Routed;
  };

  struct Paused {
    std::string wire;
    GoalId goal;
  };

  struct LimitReached {
    FailReason reason;
  };

  enum class NestedMode { Over, Into };

  EvalSession() = default;

  template <class F>
  void guarded(F&& body);
  void require_live() const;
  void step_impl(NestedMode mode, bool ignore_breakpoints, bool automatic);
  void resume();
  void run_while_deeper(std::size_t depth, bool ignore_breakpoints);
  void enter_nested(const std::string& node, const std::string& graph, const std::string& wire, GoalId id);

  Goal take_goal(Frame& frame, const std::string& wire, GoalId id);
  std::vector<std::string> matching(const std::vector<const Wire*>& wires, const Goal& g) const;
  bool commit(std::vector<Placement> placements, EventKind event);
  void place(const Goal& goal, const std::string& wire, std::size_t frame, EventKind event);
  void push_choice(ChoicePoint cp);
  bool apply_alternative(const std::string& node, std::size_t frame, const Goal& goal, const Alternative& alt,
                         std::size_t index);
  void backtrack_loop(bool forced);
  void settle();
  void note_failure(const std::string& graph, const std::string& node, const Goal& goal, std::string message);
  void fail(FailReason reason);
  void emit(TraceEvent e);
  void refresh_selection();
  void check_routing() const;

  GraphDocument doc_;
  std::string doc_hash_;
  const TacticRegistry* reg_ = nullptr;
  EvalPolicy policy_;
  EvalLimits limits_;
  std::vector<Goal> initial_goals_;

  State state_;
  std::vector<ChoicePoint> choices_;
  Status status_ = Status::Running;
  std::optional<FailureReport> failure_;
  std::optional<FailureReport> deepest_;
  std::optional<GoalId> selected_;
  std::optional<Paused> paused_;
  GoalIdSource ids_;
  std::size_t steps_ = 0;
  std::vector<TraceEvent> trace_;

  friend EvalSession replay_trace(const GraphDocument& d, std::vector<Goal> goals, std::string_view bytes,
                                  const TacticRegistry& reg);
};

/// Convenience wrapper over EvalSession::init.
EvalSession init_session(const GraphDocument& d, std::vector<Goal> goals, EvalPolicy policy = {},
                         EvalLimits limits = {}, const TacticRegistry& reg = builtin_registry());

/// (wire, alpha-class) pairs of the innermost frame, sorted.
std::vector<std::pair<std::string, std::string>> occupancy_multiset(const EvalSession& s);

std::string export_trace(const EvalSession& s);
/// Re-executes a recorded trace; throws EngineError{TraceMismatch} at the first divergent event.
EvalSession replay_trace(const GraphDocument& d, std::vector<Goal> goals, std::string_view bytes,
                         const TacticRegistry& reg = builtin_registry());

}  // namespace psg
