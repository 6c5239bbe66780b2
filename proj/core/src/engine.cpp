#include "psg/engine.hpp"

#include <algorithm>

#include "psg/hash.hpp"
#include "psg/lint.hpp"

namespace psg {

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Running: return "running";
    case Status::PausedAtBreakpoint: return "paused";
    case Status::Complete: return "complete";
    case Status::Failed: return "failed";
  }
  return "?";
}

std::string_view fail_reason_name(FailReason r) {
  switch (r) {
    case FailReason::Exhausted: return "exhausted";
    case FailReason::StepLimitExceeded: return "step_limit_exceeded";
    case FailReason::ChoiceDepthExceeded: return "choice_depth_exceeded";
  }
  return "?";
}

std::string_view choice_kind_name(ChoiceKind k) {
  return k == ChoiceKind::TacticAlternative ? "tactic_alternative" : "routing_assignment";
}

std::string_view error_code_name(EngineError::Code c) {
  using C = EngineError::Code;
  switch (c) {
    case C::LintFailed: return "LintFailed";
    case C::NoMatchingInputWire: return "NoMatchingInputWire";
    case C::NotAtNestedNode: return "NotAtNestedNode";
    case C::AtTopLevel: return "AtTopLevel";
    case C::UnknownGoal: return "UnknownGoal";
    case C::UnknownWire: return "UnknownWire";
    case C::InvalidStatus: return "InvalidStatus";
    case C::NoGoalSelected: return "NoGoalSelected";
    case C::NothingToBacktrack: return "NothingToBacktrack";
    case C::TraceMismatch: return "TraceMismatch";
  }
  return "?";
}

std::string FailureReport::str() const {
  std::string out(fail_reason_name(reason));
  if (!message.empty()) out += ": " + message;
  if (!node.empty()) out += " at node '" + node + "' in graph '" + graph + "'";
  if (!goal_text.empty()) out += " on goal " + goal.str() + " [" + goal_text + "]";
  return out;
}

std::size_t Frame::goal_count() const {
  std::size_t n = 0;
  for (const auto& [wire, goals] : occupancy) n += goals.size();
  return n;
}

const Goal* Frame::find(GoalId id, std::string* wire) const {
  for (const auto& [w, goals] : occupancy) {
    for (const Goal& g : goals) {
      if (g.id == id) {
        if (wire) *wire = w;
        return &g;
      }
    }
  }
  return nullptr;
}

namespace {

std::vector<std::string> ids_of(const std::vector<Goal>& goals) {
  std::vector<std::string> out;
  out.reserve(goals.size());
  for (const Goal& g : goals) out.push_back(g.id.str());
  return out;
}

TraceEvent goal_event(EventKind kind, const std::string& node, const Goal& goal) {
  TraceEvent e;
  e.kind = kind;
  e.node = node;
  e.goal = goal.id.str();
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

EvalSession EvalSession::init(const GraphDocument& d, std::vector<Goal> goals, EvalPolicy policy,
                              EvalLimits limits, const TacticRegistry& reg) {
  auto diags = lint(d, reg);
  if (has_errors(diags)) {
    auto first = std::find_if(diags.begin(), diags.end(),
                              [](const Diagnostic& x) { return x.severity() == Severity::Error; });
    throw EngineError(EngineError::Code::LintFailed, "document has lint errors: " + first->str(), diags);
  }
  EvalSession s;
  s.doc_ = d;
  s.doc_hash_ = sha256_hex(save_document(d));
  s.reg_ = &reg;
  s.policy_ = policy;
  s.limits_ = limits;
  s.state_.frames.push_back(Frame{d.main, {}, std::nullopt});

  auto inputs = d.main_graph().input_wires();
  std::vector<Placement> placements;
  for (Goal& g : goals) {
    g.id = s.ids_.next();
    auto candidates = s.matching(inputs, g);
    if (candidates.empty()) {
      throw EngineError(EngineError::Code::NoMatchingInputWire,
                        "goal " + g.id.str() + " [" + pretty(g) + "] matches no input wire of '" + d.main + "'");
    }
    placements.push_back({g, std::move(candidates), 0});
  }
  s.initial_goals_ = goals;
  s.guarded([&] {
    if (!s.commit(std::move(placements), EventKind::GoalEntered)) s.backtrack_loop(false);
  });
  return s;
}

EvalSession init_session(const GraphDocument& d, std::vector<Goal> goals, EvalPolicy policy, EvalLimits limits,
                         const TacticRegistry& reg) {
  return EvalSession::init(d, std::move(goals), policy, limits, reg);
}

// ---------------------------------------------------------------------------
// Public operations

template <class F>
void EvalSession::guarded(F&& body) {
  try {
    body();
  } catch (const LimitReached& l) {
    fail(l.reason);
  }
#ifndef NDEBUG
  check_routing();
#endif
}

void EvalSession::require_live() const {
  if (status_ != Status::Running && status_ != Status::PausedAtBreakpoint) {
    throw EngineError(EngineError::Code::InvalidStatus,
                      "session is " + std::string(status_name(status_)) + "; it must be running or paused");
  }
}

void EvalSession::step() {
  require_live();
  guarded([&] { step_impl(NestedMode::Over, false, false); });
}

void EvalSession::step_into() {
  require_live();
  if (!at_nested_node()) throw EngineError(EngineError::Code::NotAtNestedNode, "the next goal is not at a nested node");
  guarded([&] { step_impl(NestedMode::Into, false, false); });
}

void EvalSession::step_over() {
  require_live();
  if (!at_nested_node()) throw EngineError(EngineError::Code::NotAtNestedNode, "the next goal is not at a nested node");
  guarded([&] { step_impl(NestedMode::Over, false, false); });
}

void EvalSession::finish_node() {
  require_live();
  if (state_.frames.size() <= 1) throw EngineError(EngineError::Code::AtTopLevel, "not inside a nested frame");
  guarded([&] {
    std::size_t depth = state_.frames.size() - 1;
    if (status_ == Status::PausedAtBreakpoint) resume();
    run_while_deeper(depth, false);
  });
}

void EvalSession::finish(bool ignore_breakpoints) {
  require_live();
  guarded([&] {
    if (status_ == Status::PausedAtBreakpoint) resume();
    while (status_ == Status::Running) step_impl(NestedMode::Into, ignore_breakpoints, true);
  });
}

void EvalSession::run_to_breakpoint() { finish(false); }

void EvalSession::select_goal(GoalId id) {
  if (state_.frames.empty() || !state_.frames.back().find(id)) {
    throw EngineError(EngineError::Code::UnknownGoal, "no goal " + id.str() + " in the current frame");
  }
  selected_ = id;
}

void EvalSession::backtrack() {
  if (choices_.empty()) throw EngineError(EngineError::Code::NothingToBacktrack, "nothing to backtrack");
  guarded([&] { backtrack_loop(true); });
}

void EvalSession::toggle_breakpoint(const std::string& wire) {
  std::string gname = current_graph().name;
  PSGraph& g = doc_.graphs.at(gname);
  if (!g.wires.count(wire)) {
    throw EngineError(EngineError::Code::UnknownWire, "no wire '" + wire + "' in graph '" + gname + "'");
  }
  BreakpointEdit edit;
  try {
    edit = psg::toggle_breakpoint(g, wire);
  } catch (const std::invalid_argument& e) {
    throw EngineError(EngineError::Code::InvalidStatus, e.what());
  }
  if (!edit.inserted) {
    // Goals on the removed half move to the surviving wire, in every saved state too.
    auto merge = [&](State& s) {
      for (Frame& f : s.frames) {
        if (f.graph != gname) continue;
        auto it = f.occupancy.find(edit.downstream);
        if (it == f.occupancy.end()) continue;
        auto moved = std::move(it->second);
        f.occupancy.erase(it);
        auto& up = f.occupancy[edit.upstream];
        up.insert(up.end(), moved.begin(), moved.end());
      }
    };
    merge(state_);
    for (ChoicePoint& cp : choices_) {
      merge(cp.snapshot);
      for (Placement& p : cp.pending) {
        if (cp.snapshot.frames.size() > p.frame && cp.snapshot.frames[p.frame].graph == gname) {
          std::replace(p.candidates.begin(), p.candidates.end(), edit.downstream, edit.upstream);
        }
      }
    }
    if (paused_ && paused_->wire == edit.upstream) {
      paused_.reset();
      status_ = Status::Running;
    }
  }
  TraceEvent e;
  e.kind = EventKind::BreakpointToggled;
  e.graph = gname;
  e.wire = wire;
  e.node = edit.node;
  e.flag = edit.inserted;
  emit(std::move(e));
}

// ---------------------------------------------------------------------------
// Queries

const PSGraph& EvalSession::current_graph() const {
  if (state_.frames.empty()) return doc_.main_graph();
  return doc_.graph(state_.frames.back().graph);
}

std::optional<std::pair<std::string, GoalId>> EvalSession::next_goal() const {
  if (state_.frames.empty()) return std::nullopt;
  if (paused_) return std::pair{paused_->wire, paused_->goal};
  const Frame& top = state_.frames.back();
  std::string wire;
  if (selected_ && top.find(*selected_, &wire)) return std::pair{wire, *selected_};
  for (const auto& [w, goals] : top.occupancy) {
    if (!goals.empty()) return std::pair{w, goals.front().id};
  }
  return std::nullopt;
}

bool EvalSession::at_nested_node() const {
  if (paused_) return false;
  auto next = next_goal();
  if (!next) return false;
  const Wire& w = current_graph().wire(next->first);
  const auto* node = w.dst_node();
  return node && std::holds_alternative<NestedNode>(current_graph().node(*node));
}

std::vector<std::string> EvalSession::routing_violations() const {
  std::vector<std::string> out;
  for (const Frame& f : state_.frames) {
    const PSGraph& g = doc_.graph(f.graph);
    for (const auto& [wire, goals] : f.occupancy) {
      auto it = g.wires.find(wire);
      for (const Goal& goal : goals) {
        if (it == g.wires.end()) {
          out.push_back(goal.id.str() + " on missing wire '" + wire + "' of graph '" + f.graph + "'");
        } else if (!eval_goaltype(it->second.goal_type, goal)) {
          out.push_back(goal.id.str() + " [" + pretty(goal) + "] violates '" + pretty(it->second.goal_type) +
                        "' on wire '" + wire + "' of graph '" + f.graph + "'");
        }
      }
    }
  }
  return out;
}

void EvalSession::check_routing() const {
  auto violations = routing_violations();
  if (!violations.empty()) throw std::logic_error("routing invariant broken: " + violations.front());
}

// ---------------------------------------------------------------------------
// Step semantics

void EvalSession::step_impl(NestedMode mode, bool ignore_breakpoints, bool automatic) {
  require_live();
  if (status_ == Status::PausedAtBreakpoint) {
    resume();
    return;
  }
  auto next = next_goal();
  if (!next) throw std::logic_error("running session without goals");
  const Frame& top = state_.frames.back();
  if (!automatic && policy_.goal_selection == GoalSelection::Manual && !selected_ && top.goal_count() > 1) {
    throw EngineError(EngineError::Code::NoGoalSelected, "manual goal selection: select a goal first");
  }
  if (steps_ >= limits_.max_steps) throw LimitReached{FailReason::StepLimitExceeded};
  ++steps_;

  const std::size_t fi = state_.frames.size() - 1;
  const std::string wire_id = next->first;
  const GoalId goal_id = next->second;
  const PSGraph& g = doc_.graph(top.graph);
  const Wire& wire = g.wire(wire_id);

  if (const auto* out = std::get_if<OutputBoundary>(&wire.dst)) {
    Goal goal = take_goal(state_.frames[fi], wire_id, goal_id);
    TraceEvent e = goal_event(EventKind::GoalExited, "", goal);
    e.wire = wire_id;
    e.index = out->index;
    emit(std::move(e));
    if (fi == 0) {
      state_.results.push_back(std::move(goal));
      settle();
      return;
    }
    const std::string node = *state_.frames[fi].via_node;
    const PSGraph& parent = doc_.graph(state_.frames[fi - 1].graph);
    auto candidates = matching(parent.out_wires(node), goal);
    if (candidates.empty()) note_failure(parent.name, node, goal, "no out-wire of the nested node accepts the goal");
    if (!commit({{goal, std::move(candidates), fi - 1}}, EventKind::Routed)) backtrack_loop(false);
    return;
  }

  const std::string node = *wire.dst_node();
  const NodeKind kind = g.node(node);
  const std::string gname = g.name;

  if (const auto* atomic = std::get_if<AtomicNode>(&kind)) {
    Goal goal = take_goal(state_.frames[fi], wire_id, goal_id);
    auto alts = apply_tactic(*reg_, atomic->tactic, goal, ids_);
    if (alts.empty()) {
      emit(goal_event(EventKind::TacticFailed, node, goal));
      note_failure(gname, node, goal, "tactic '" + atomic->tactic + "' does not apply");
      backtrack_loop(false);
      return;
    }
    if (alts.size() > 1) {
      ChoicePoint cp;
      cp.kind = ChoiceKind::TacticAlternative;
      cp.snapshot = state_;
      cp.node = node;
      cp.frame = fi;
      cp.goal = goal;
      cp.alternatives = alts;
      push_choice(std::move(cp));
    }
    if (!apply_alternative(node, fi, goal, alts.front(), 0)) backtrack_loop(false);
    return;
  }

  bool is_break = std::holds_alternative<BreakpointNode>(kind);
  if (is_break && !ignore_breakpoints) {
    status_ = Status::PausedAtBreakpoint;
    paused_ = Paused{wire_id, goal_id};
    TraceEvent e;
    e.kind = EventKind::BreakpointHit;
    e.node = node;
    e.wire = wire_id;
    e.goal = goal_id.str();
    emit(std::move(e));
    return;
  }

  if (is_break || std::holds_alternative<IdentityNode>(kind)) {
    Goal goal = take_goal(state_.frames[fi], wire_id, goal_id);
    emit(goal_event(EventKind::Passed, node, goal));
    auto candidates = matching(g.out_wires(node), goal);
    if (candidates.empty()) note_failure(gname, node, goal, "no out-wire accepts the goal");
    if (!commit({{goal, std::move(candidates), fi}}, EventKind::Routed)) backtrack_loop(false);
    return;
  }

  const auto& nested = std::get<NestedNode>(kind);
  std::size_t depth = state_.frames.size();
  enter_nested(node, nested.graph, wire_id, goal_id);
  if (mode == NestedMode::Over) run_while_deeper(depth, ignore_breakpoints);
}

void EvalSession::resume() {
  Paused p = *paused_;
  paused_.reset();
  status_ = Status::Running;
  if (steps_ >= limits_.max_steps) throw LimitReached{FailReason::StepLimitExceeded};
  ++steps_;
  const std::size_t fi = state_.frames.size() - 1;
  const PSGraph& g = doc_.graph(state_.frames[fi].graph);
  const std::string node = *g.wire(p.wire).dst_node();
  Goal goal = take_goal(state_.frames[fi], p.wire, p.goal);
  emit(goal_event(EventKind::Resumed, node, goal));
  auto candidates = matching(g.out_wires(node), goal);
  if (candidates.empty()) note_failure(g.name, node, goal, "no out-wire accepts the goal");
  if (!commit({{goal, std::move(candidates), fi}}, EventKind::Routed)) backtrack_loop(false);
}

void EvalSession::run_while_deeper(std::size_t depth, bool ignore_breakpoints) {
  while (status_ == Status::Running && state_.frames.size() > depth) {
    step_impl(NestedMode::Into, ignore_breakpoints, true);
  }
}

void EvalSession::enter_nested(const std::string& node, const std::string& graph, const std::string& wire,
                               GoalId id) {
  Goal goal = take_goal(state_.frames.back(), wire, id);
  state_.frames.push_back(Frame{graph, {}, node});
  const std::size_t fi = state_.frames.size() - 1;
  TraceEvent e = goal_event(EventKind::EnteredNested, node, goal);
  e.graph = graph;
  emit(std::move(e));
  const PSGraph& inner = doc_.graph(graph);
  auto candidates = matching(inner.input_wires(), goal);
  if (candidates.empty()) note_failure(graph, node, goal, "no input wire of the nested graph accepts the goal");
  if (!commit({{goal, std::move(candidates), fi}}, EventKind::Routed)) backtrack_loop(false);
}

Goal EvalSession::take_goal(Frame& frame, const std::string& wire, GoalId id) {
  auto it = frame.occupancy.find(wire);
  if (it == frame.occupancy.end()) throw std::logic_error("no goals on wire '" + wire + "'");
  auto& goals = it->second;
  auto pos = std::find_if(goals.begin(), goals.end(), [&](const Goal& g) { return g.id == id; });
  if (pos == goals.end()) throw std::logic_error("goal " + id.str() + " is not on wire '" + wire + "'");
  Goal goal = std::move(*pos);
  goals.erase(pos);
  if (goals.empty()) frame.occupancy.erase(it);
  return goal;
}

std::vector<std::string> EvalSession::matching(const std::vector<const Wire*>& wires, const Goal& g) const {
  std::vector<std::string> out;
  for (const Wire* w : wires) {
    if (eval_goaltype(w->goal_type, g)) out.push_back(w->id);
  }
  return out;
}

bool EvalSession::commit(std::vector<Placement> placements, EventKind event) {
  for (const Placement& p : placements) {
    if (p.candidates.empty()) return false;
  }
  for (std::size_t i = 0; i < placements.size(); ++i) {
    if (placements[i].candidates.size() > 1) {
      ChoicePoint cp;
      cp.kind = ChoiceKind::RoutingAssignment;
      cp.snapshot = state_;
      cp.pending.assign(placements.begin() + static_cast<std::ptrdiff_t>(i), placements.end());
      cp.route_event = event;
      push_choice(std::move(cp));
    }
    place(placements[i].goal, placements[i].candidates.front(), placements[i].frame, event);
  }
  settle();
  return true;
}

void EvalSession::place(const Goal& goal, const std::string& wire, std::size_t frame, EventKind event) {
  state_.frames.at(frame).occupancy[wire].push_back(goal);
  TraceEvent e;
  e.kind = event;
  e.goal = goal.id.str();
  e.wire = wire;
  emit(std::move(e));
}

void EvalSession::push_choice(ChoicePoint cp) {
  if (choices_.size() >= limits_.max_choice_depth) throw LimitReached{FailReason::ChoiceDepthExceeded};
  choices_.push_back(std::move(cp));
}

bool EvalSession::apply_alternative(const std::string& node, std::size_t frame, const Goal& goal,
                                    const Alternative& alt, std::size_t index) {
  TraceEvent e = goal_event(EventKind::TacticApplied, node, goal);
  e.index = index;
  e.goals = ids_of(alt.subgoals);
  emit(std::move(e));
  const PSGraph& g = doc_.graph(state_.frames.at(frame).graph);
  auto outs = g.out_wires(node);
  std::vector<Placement> placements;
  for (const Goal& sub : alt.subgoals) {
    auto candidates = matching(outs, sub);
    if (candidates.empty()) {
      note_failure(g.name, node, sub, "no out-wire accepts subgoal of alternative " + std::to_string(index));
      return false;
    }
    placements.push_back({sub, std::move(candidates), frame});
  }
  return commit(std::move(placements), EventKind::Routed);
}

void EvalSession::backtrack_loop(bool forced) {
  bool first = true;
  while (true) {
    if (choices_.empty()) {
      fail(FailReason::Exhausted);
      return;
    }
    ChoicePoint& cp = choices_.back();
    state_ = cp.snapshot;
    status_ = Status::Running;
    paused_.reset();
    const std::size_t option = cp.next++;

    TraceEvent e;
    e.kind = EventKind::Backtracked;
    e.detail = std::string(choice_kind_name(cp.kind));
    e.index = option;
    e.flag = forced && first;
    emit(std::move(e));
    first = false;
    refresh_selection();

    if (cp.kind == ChoiceKind::TacticAlternative) {
      std::string node = cp.node;
      std::size_t frame = cp.frame;
      Goal goal = cp.goal;
      Alternative alt = cp.alternatives[option];
      if (cp.next >= cp.alternatives.size()) choices_.pop_back();
      if (apply_alternative(node, frame, goal, alt, option)) return;
    } else {
      std::vector<Placement> pending = cp.pending;
      EventKind event = cp.route_event;
      if (cp.next >= pending.front().candidates.size()) choices_.pop_back();
      place(pending.front().goal, pending.front().candidates[option], pending.front().frame, event);
      pending.erase(pending.begin());
      if (commit(std::move(pending), event)) return;
    }
  }
}

void EvalSession::settle() {
  while (!state_.frames.empty()) {
    const Frame& top = state_.frames.back();
    if (top.goal_count() > 0) break;
    if (state_.frames.size() == 1) {
      state_.frames.pop_back();
      status_ = Status::Complete;
      failure_.reset();
      TraceEvent e;
      e.kind = EventKind::Finished;
      e.detail = "complete";
      e.goals = ids_of(state_.results);
      emit(std::move(e));
      break;
    }
    std::string node = *top.via_node;
    state_.frames.pop_back();
    TraceEvent e;
    e.kind = EventKind::ExitedNested;
    e.node = node;
    emit(std::move(e));
  }
  refresh_selection();
}

void EvalSession::note_failure(const std::string& graph, const std::string& node, const Goal& goal,
                               std::string message) {
  std::size_t depth = choices_.size();
  if (deepest_ && deepest_->depth > depth) return;
  deepest_ = FailureReport{FailReason::Exhausted, graph, node, goal.id, pretty(goal), std::move(message), depth};
}

void EvalSession::fail(FailReason reason) {
  status_ = Status::Failed;
  paused_.reset();
  if (reason == FailReason::Exhausted && deepest_) {
    failure_ = deepest_;
  } else {
    FailureReport r;
    r.reason = reason;
    r.depth = choices_.size();
    if (reason == FailReason::StepLimitExceeded) {
      r.message = "step limit of " + std::to_string(limits_.max_steps) + " exceeded";
    } else if (reason == FailReason::ChoiceDepthExceeded) {
      r.message = "choice depth limit of " + std::to_string(limits_.max_choice_depth) + " exceeded";
    } else {
      r.message = "no options left";
    }
    if (!state_.frames.empty()) r.graph = state_.frames.back().graph;
    failure_ = r;
  }
  TraceEvent e;
  e.kind = EventKind::Finished;
  e.detail = "failed";
  e.reason = std::string(fail_reason_name(reason));
  e.goals = ids_of(state_.results);
  emit(std::move(e));
}

void EvalSession::emit(TraceEvent e) { trace_.push_back(std::move(e)); }

void EvalSession::refresh_selection() {
  if (selected_ && (state_.frames.empty() || !state_.frames.back().find(*selected_))) selected_.reset();
}

// ---------------------------------------------------------------------------
// Occupancy, export, replay

std::vector<std::pair<std::string, std::string>> occupancy_multiset(const EvalSession& s) {
  std::vector<std::pair<std::string, std::string>> out;
  if (s.frames().empty()) return out;
  for (const auto& [wire, goals] : s.frames().back().occupancy) {
    for (const Goal& g : goals) out.emplace_back(wire, canonical_key(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string export_trace(const EvalSession& s) {
  TraceFile t;
  t.doc_hash = s.document_hash();
  for (const Goal& g : s.initial_goals()) t.goals.push_back(pretty(g));
  t.limits = {s.limits().max_steps, s.limits().max_choice_depth};
  t.events = s.trace();
  return write_trace(t);
}

namespace {

[[noreturn]] void mismatch(std::size_t index, const std::string& why) {
  throw EngineError(EngineError::Code::TraceMismatch, "trace mismatch at event " + std::to_string(index) + ": " + why,
                    {}, index);
}

}  // namespace

EvalSession replay_trace(const GraphDocument& d, std::vector<Goal> goals, std::string_view bytes,
                         const TacticRegistry& reg) {
  TraceFile t;
  try {
    t = read_trace(bytes);
  } catch (const std::invalid_argument& e) {
    mismatch(0, e.what());
  }
  if (t.doc_hash != sha256_hex(save_document(d))) mismatch(0, "trace was recorded against a different document");
  if (t.goals.size() != goals.size()) mismatch(0, "initial goal count differs");
  for (std::size_t i = 0; i < goals.size(); ++i) {
    Goal recorded;
    try {
      recorded = parse_goal(t.goals[i]);
    } catch (const std::exception& e) {
      mismatch(0, std::string("recorded goal does not parse: ") + e.what());
    }
    if (!recorded.same_content(goals[i])) mismatch(0, "initial goal " + std::to_string(i) + " differs");
  }
  EvalLimits limits;
  if (t.limits.max_steps) limits.max_steps = t.limits.max_steps;
  if (t.limits.max_choice_depth) limits.max_choice_depth = t.limits.max_choice_depth;

  std::optional<EvalSession> session;
  try {
    session = EvalSession::init(d, std::move(goals), {}, limits, reg);
  } catch (const EngineError& e) {
    mismatch(0, e.what());
  }
  EvalSession& s = *session;

  auto compare_from = [&](std::size_t from) {
    for (std::size_t k = from; k < s.trace().size(); ++k) {
      if (k >= t.events.size()) mismatch(k, "replay produced extra event " + to_json_text(s.trace()[k]));
      if (s.trace()[k] != t.events[k]) {
        mismatch(k, "expected " + to_json_text(t.events[k]) + ", got " + to_json_text(s.trace()[k]));
      }
    }
  };
  compare_from(0);

  while (s.trace().size() < t.events.size()) {
    const std::size_t k = s.trace().size();
    const TraceEvent& ev = t.events[k];
    try {
      switch (ev.kind) {
        case EventKind::BreakpointToggled: s.toggle_breakpoint(ev.wire); break;
        case EventKind::Backtracked:
          if (!ev.flag) mismatch(k, "engine-initiated backtrack without a preceding failure");
          s.backtrack();
          break;
        case EventKind::Resumed:
        case EventKind::Finished:
          s.require_live();
          s.guarded([&] { s.step_impl(EvalSession::NestedMode::Into, false, true); });
          break;
        case EventKind::TacticApplied:
        case EventKind::TacticFailed:
        case EventKind::Passed:
        case EventKind::GoalExited:
        case EventKind::EnteredNested:
        case EventKind::BreakpointHit: {
          s.require_live();
          s.select_goal(GoalId::parse(ev.goal));
          bool ignore = ev.kind != EventKind::BreakpointHit;
          s.guarded([&] { s.step_impl(EvalSession::NestedMode::Into, ignore, true); });
          break;
        }
        default: mismatch(k, "event " + to_json_text(ev) + " cannot start a step");
      }
    } catch (const EngineError& e) {
      if (e.code() == EngineError::Code::TraceMismatch) throw;
      mismatch(k, e.what());
    } catch (const std::invalid_argument& e) {
      mismatch(k, e.what());
    }
    if (s.trace().size() == k) mismatch(k, "replay made no progress");
    compare_from(k);
  }
  return std::move(s);
}

}  // namespace psg
