#include "psg/trace.hpp"

#include <array>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

namespace psg {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<EventKind, const char*>, 13> kNames = {{
    {EventKind::GoalEntered, "goal_entered"},
    {EventKind::TacticApplied, "tactic_applied"},
    {EventKind::TacticFailed, "tactic_failed"},
    {EventKind::Passed, "passed"},
    {EventKind::Routed, "routed"},
    {EventKind::GoalExited, "goal_exited"},
    {EventKind::EnteredNested, "entered_nested"},
    {EventKind::ExitedNested, "exited_nested"},
    {EventKind::BreakpointHit, "breakpoint_hit"},
    {EventKind::Resumed, "resumed"},
    {EventKind::Backtracked, "backtracked"},
    {EventKind::BreakpointToggled, "breakpoint_toggled"},
    {EventKind::Finished, "finished"},
}};

// Per-kind spelling of the generic index / list / detail / flag slots.
const char* index_key(EventKind k) {
  switch (k) {
    case EventKind::TacticApplied: return "alt";
    case EventKind::Backtracked: return "option";
    case EventKind::GoalExited: return "out";
    default: return "index";
  }
}

const char* goals_key(EventKind k) { return k == EventKind::Finished ? "results" : "subgoals"; }
const char* detail_key(EventKind k) { return k == EventKind::Finished ? "status" : "choice"; }
const char* flag_key(EventKind k) { return k == EventKind::BreakpointToggled ? "inserted" : "forced"; }

bool has_goals(EventKind k) { return k == EventKind::TacticApplied || k == EventKind::Finished; }
bool has_flag(EventKind k) { return k == EventKind::Backtracked || k == EventKind::BreakpointToggled; }

json event_to_json(const TraceEvent& e) {
  json j = {{"k", event_kind_name(e.kind)}};
  if (!e.node.empty()) j["node"] = e.node;
  if (!e.wire.empty()) j["wire"] = e.wire;
  if (!e.graph.empty()) j["graph"] = e.graph;
  if (!e.goal.empty()) j["goal"] = e.goal;
  if (e.index) j[index_key(e.kind)] = *e.index;
  if (has_goals(e.kind)) j[goals_key(e.kind)] = e.goals;
  if (!e.detail.empty()) j[detail_key(e.kind)] = e.detail;
  if (!e.reason.empty()) j["reason"] = e.reason;
  if (has_flag(e.kind)) j[flag_key(e.kind)] = e.flag;
  return j;
}

std::string opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return {};
  if (!it->is_string()) throw std::invalid_argument(std::string("trace event field '") + key + "' must be a string");
  return it->get<std::string>();
}

TraceEvent event_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("trace event must be an object");
  auto kind = event_kind_from_name(opt_string(j, "k"));
  if (!kind) throw std::invalid_argument("unknown trace event kind '" + opt_string(j, "k") + "'");
  TraceEvent e;
  e.kind = *kind;
  e.node = opt_string(j, "node");
  e.wire = opt_string(j, "wire");
  e.graph = opt_string(j, "graph");
  e.goal = opt_string(j, "goal");
  if (auto it = j.find(index_key(e.kind)); it != j.end()) e.index = it->get<std::size_t>();
  if (has_goals(e.kind)) e.goals = j.value(goals_key(e.kind), std::vector<std::string>{});
  e.detail = opt_string(j, detail_key(e.kind));
  e.reason = opt_string(j, "reason");
  if (has_flag(e.kind)) e.flag = j.value(flag_key(e.kind), false);
  return e;
}

}  // namespace

std::string_view event_kind_name(EventKind k) {
  for (const auto& [kind, name] : kNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<EventKind> event_kind_from_name(std::string_view name) {
  for (const auto& [kind, n] : kNames) {
    if (name == n) return kind;
  }
  return std::nullopt;
}

std::string to_json_text(const TraceEvent& e) { return event_to_json(e).dump(); }

std::string write_trace(const TraceFile& t) {
  json j;
  j["version"] = 1;
  j["doc_hash"] = t.doc_hash;
  j["goals"] = t.goals;
  j["limits"] = {{"max_steps", t.limits.max_steps}, {"max_choice_depth", t.limits.max_choice_depth}};
  json events = json::array();
  for (const auto& e : t.events) events.push_back(event_to_json(e));
  j["events"] = std::move(events);
  return j.dump(2) + "\n";
}

TraceFile read_trace(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("trace is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("version", 0) != 1) throw std::invalid_argument("unsupported trace version");
  try {
    TraceFile t;
    t.doc_hash = j.at("doc_hash").get<std::string>();
    t.goals = j.value("goals", std::vector<std::string>{});
    if (auto it = j.find("limits"); it != j.end()) {
      t.limits.max_steps = it->at("max_steps").get<std::size_t>();
      t.limits.max_choice_depth = it->at("max_choice_depth").get<std::size_t>();
    }
    for (const auto& e : j.at("events")) t.events.push_back(event_from_json(e));
    return t;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed trace: ") + e.what());
  }
}

}  // namespace psg
