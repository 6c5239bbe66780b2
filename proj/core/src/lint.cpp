#include "psg/lint.hpp"

#include <algorithm>
#include <set>

namespace psg {

namespace {

void unknown_tactics(const PSGraph& g, const TacticRegistry& reg, std::vector<Diagnostic>& out) {
  for (const auto& [id, kind] : g.nodes) {
    const auto* atomic = std::get_if<AtomicNode>(&kind);
    if (atomic && !reg.contains(atomic->tactic)) {
      out.push_back({DiagCode::E001, "unknown tactic '" + atomic->tactic + "'", g.name, id, ""});
    }
  }
}

// Nodes a goal can never reach starting from the graph's input boundaries.
void unreachable_nodes(const PSGraph& g, std::vector<Diagnostic>& out) {
  std::set<std::string> seen;
  std::vector<std::string> todo;
  for (const Wire* w : g.input_wires()) {
    if (const auto* d = w->dst_node(); d && seen.insert(*d).second) todo.push_back(*d);
  }
  while (!todo.empty()) {
    std::string cur = todo.back();
    todo.pop_back();
    for (const Wire* w : g.out_wires(cur)) {
      if (const auto* d = w->dst_node(); d && seen.insert(*d).second) todo.push_back(*d);
    }
  }
  for (const auto& [id, kind] : g.nodes) {
    if (seen.count(id)) continue;
    bool isolated = g.in_wires(id).empty() && g.out_wires(id).empty();
    out.push_back({DiagCode::E005,
                   isolated ? "node has no incident wires" : "node is not reachable from any input boundary",
                   g.name, id, ""});
  }
}

void suspicious_goal_types(const PSGraph& g, std::vector<Diagnostic>& out) {
  for (const auto& [id, w] : g.wires) {
    if (looks_unsatisfiable(w.goal_type)) {
      out.push_back({DiagCode::W001, "goal type '" + pretty(w.goal_type) + "' admits no goal", g.name, "", id});
    }
  }
}

}  // namespace

std::vector<Diagnostic> lint(const GraphDocument& d, const TacticRegistry& reg) {
  std::vector<Diagnostic> out = structural_diagnostics(d);
  for (const auto& [name, g] : d.graphs) {
    unknown_tactics(g, reg, out);
    unreachable_nodes(g, out);
    suspicious_goal_types(g, out);
  }
  std::sort(out.begin(), out.end(), diagnostic_less);
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity() == Severity::Error; });
}

}  // namespace psg
