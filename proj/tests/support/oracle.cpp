#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace psg::testing {

namespace {

struct Level {
  const PSGraph* graph;
  std::string via;  // nested node in the level below
};

GoalMultiset merged(const GoalMultiset& a, const GoalMultiset& b) {
  GoalMultiset out;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Outcomes product(const Outcomes& a, const Outcomes& b) {
  Outcomes out;
  for (const auto& x : a) {
    for (const auto& y : b) out.insert(merged(x, y));
  }
  return out;
}

class Walker {
 public:
  Walker(const GraphDocument& d, const TacticRegistry& reg, std::size_t max_calls)
      : d_(d), reg_(reg), max_calls_(max_calls) {}

  Outcomes initial(const Goal& g) {
    std::vector<Level> stack{{&d_.main_graph(), ""}};
    return route(g, stack, d_.main_graph().input_wires());
  }

 private:
  Outcomes route(const Goal& g, std::vector<Level>& stack, const std::vector<const Wire*>& wires) {
    Outcomes out;
    for (const Wire* w : wires) {
      if (!eval_goaltype(w->goal_type, g)) continue;
      Outcomes sub = at_wire(g, stack, *w);
      out.insert(sub.begin(), sub.end());
    }
    return out;
  }

  Outcomes at_wire(const Goal& g, std::vector<Level>& stack, const Wire& w) {
    if (++calls_ > max_calls_) throw std::runtime_error("oracle call budget exhausted");
    const PSGraph& graph = *stack.back().graph;
    if (std::holds_alternative<OutputBoundary>(w.dst)) {
      if (stack.size() == 1) return {{canonical_key(g)}};
      Level top = stack.back();
      stack.pop_back();
      Outcomes out = route(g, stack, stack.back().graph->out_wires(top.via));
      stack.push_back(top);
      return out;
    }
    const std::string& node = std::get<NodeEnd>(w.dst).node;
    const NodeKind& kind = graph.nodes.at(node);
    if (const auto* a = std::get_if<AtomicNode>(&kind)) {
      Outcomes out;
      GoalIdSource ids;
      for (const Alternative& alt : apply_tactic(reg_, a->tactic, g, ids)) {
        Outcomes acc = {GoalMultiset{}};
        for (const Goal& sub : alt.subgoals) {
          acc = product(acc, route(sub, stack, graph.out_wires(node)));
          if (acc.empty()) break;
        }
        out.insert(acc.begin(), acc.end());
      }
      return out;
    }
    if (const auto* n = std::get_if<NestedNode>(&kind)) {
      stack.push_back({&d_.graph(n->graph), node});
      Outcomes out = route(g, stack, d_.graph(n->graph).input_wires());
      stack.pop_back();
      return out;
    }
    return route(g, stack, graph.out_wires(node));
  }

  const GraphDocument& d_;
  const TacticRegistry& reg_;
  std::size_t max_calls_;
  std::size_t calls_ = 0;
};

}  // namespace

Outcomes recursive_outcomes(const GraphDocument& d, const std::vector<Goal>& goals, const TacticRegistry& reg,
                            std::size_t max_calls) {
  Walker walker(d, reg, max_calls);
  Outcomes acc = {GoalMultiset{}};
  for (const Goal& g : goals) acc = product(acc, walker.initial(g));
  return acc;
}

bool nesting_cycle_by_toposort(const GraphDocument& d) {
  std::map<std::string, std::set<std::string>> edges;
  std::map<std::string, int> indegree;
  for (const auto& [name, g] : d.graphs) indegree[name];
  for (const auto& [name, g] : d.graphs) {
    for (const auto& [id, kind] : g.nodes) {
      const auto* n = std::get_if<NestedNode>(&kind);
      if (n && d.graphs.count(n->graph) && edges[name].insert(n->graph).second) ++indegree[n->graph];
    }
  }
  std::vector<std::string> ready;
  for (const auto& [name, deg] : indegree) {
    if (deg == 0) ready.push_back(name);
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    std::string cur = ready.back();
    ready.pop_back();
    ++removed;
    for (const std::string& next : edges[cur]) {
      if (--indegree[next] == 0) ready.push_back(next);
    }
  }
  return removed != d.graphs.size();
}

}  // namespace psg::testing
