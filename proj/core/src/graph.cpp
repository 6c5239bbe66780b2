#include "psg/graph.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace psg {

using nlohmann::json;

const std::string* Wire::src_node() const {
  auto* n = std::get_if<NodeEnd>(&src);
  return n ? &n->node : nullptr;
}

const std::string* Wire::dst_node() const {
  auto* n = std::get_if<NodeEnd>(&dst);
  return n ? &n->node : nullptr;
}

void PSGraph::add_wire(Wire w) {
  std::string id = w.id;
  if (!wires.emplace(id, std::move(w)).second) throw std::invalid_argument("duplicate wire id '" + id + "'");
}

std::vector<const Wire*> PSGraph::out_wires(const std::string& node) const {
  std::vector<const Wire*> out;
  for (const auto& [id, w] : wires) {
    if (const auto* s = w.src_node(); s && *s == node) out.push_back(&w);
  }
  return out;
}

std::vector<const Wire*> PSGraph::in_wires(const std::string& node) const {
  std::vector<const Wire*> out;
  for (const auto& [id, w] : wires) {
    if (const auto* d = w.dst_node(); d && *d == node) out.push_back(&w);
  }
  return out;
}

std::vector<const Wire*> PSGraph::input_wires() const {
  std::vector<const Wire*> out;
  for (const auto& [id, w] : wires) {
    if (std::holds_alternative<InputBoundary>(w.src)) out.push_back(&w);
  }
  return out;
}

const Wire& PSGraph::wire(const std::string& id) const {
  auto it = wires.find(id);
  if (it == wires.end()) throw std::out_of_range("no wire '" + id + "' in graph '" + name + "'");
  return it->second;
}

const NodeKind& PSGraph::node(const std::string& id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw std::out_of_range("no node '" + id + "' in graph '" + name + "'");
  return it->second;
}

const PSGraph& GraphDocument::graph(const std::string& name) const {
  auto it = graphs.find(name);
  if (it == graphs.end()) throw std::out_of_range("no graph '" + name + "' in document");
  return it->second;
}

std::string node_kind_name(const NodeKind& k) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomicNode>) return "atomic";
        if constexpr (std::is_same_v<T, NestedNode>) return "nested";
        if constexpr (std::is_same_v<T, IdentityNode>) return "identity";
        return "breakpoint";
      },
      k);
}

// ---------------------------------------------------------------------------
// Diagnostics

std::string_view code_name(DiagCode c) {
  switch (c) {
    case DiagCode::E001: return "E001";
    case DiagCode::E002: return "E002";
    case DiagCode::E003: return "E003";
    case DiagCode::E004: return "E004";
    case DiagCode::E005: return "E005";
    case DiagCode::W001: return "W001";
  }
  return "?";
}

Severity severity_of(DiagCode c) { return c == DiagCode::W001 ? Severity::Warning : Severity::Error; }

std::string Diagnostic::location() const {
  if (!node.empty()) return "node:" + node;
  if (!wire.empty()) return "wire:" + wire;
  return "";
}

std::string Diagnostic::str() const {
  std::string out(code_name(code));
  out += " " + graph;
  if (auto loc = location(); !loc.empty()) out += " " + loc;
  out += ": " + message;
  return out;
}

bool diagnostic_less(const Diagnostic& a, const Diagnostic& b) {
  return std::tuple(a.graph, a.code, a.location(), a.message) < std::tuple(b.graph, b.code, b.location(), b.message);
}

LoadError::LoadError(Kind kind, std::string pointer, const std::string& message, std::vector<Diagnostic> diags)
    : std::runtime_error(pointer.empty() ? message : message + " (at " + pointer + ")"),
      kind_(kind),
      pointer_(std::move(pointer)),
      diagnostics_(std::move(diags)) {}

// ---------------------------------------------------------------------------
// Structural checks

bool has_nesting_cycle(const GraphDocument& d) {
  enum class Mark { White, Grey, Black };
  std::map<std::string, Mark> mark;
  std::function<bool(const std::string&)> visit = [&](const std::string& name) {
    auto it = d.graphs.find(name);
    if (it == d.graphs.end()) return false;
    Mark& m = mark[name];
    if (m == Mark::Grey) return true;
    if (m == Mark::Black) return false;
    m = Mark::Grey;
    for (const auto& [id, kind] : it->second.nodes) {
      if (const auto* n = std::get_if<NestedNode>(&kind); n && visit(n->graph)) return true;
    }
    mark[name] = Mark::Black;
    return false;
  };
  return std::any_of(d.graphs.begin(), d.graphs.end(), [&](const auto& kv) { return visit(kv.first); });
}

namespace {

/// Graphs reachable from `from` through one or more nesting edges.
std::set<std::string> nesting_closure(const GraphDocument& d, const std::string& from) {
  std::set<std::string> seen;
  std::vector<std::string> todo{from};
  while (!todo.empty()) {
    std::string cur = todo.back();
    todo.pop_back();
    auto it = d.graphs.find(cur);
    if (it == d.graphs.end()) continue;
    for (const auto& [id, kind] : it->second.nodes) {
      if (const auto* n = std::get_if<NestedNode>(&kind); n && seen.insert(n->graph).second) {
        todo.push_back(n->graph);
      }
    }
  }
  return seen;
}

}  // namespace

std::vector<Diagnostic> structural_diagnostics(const GraphDocument& d) {
  std::vector<Diagnostic> out;
  if (!d.graphs.count(d.main)) {
    out.push_back({DiagCode::E002, "main graph '" + d.main + "' is not defined", d.main, "", ""});
  }
  for (const auto& [gname, g] : d.graphs) {
    for (const auto& [nid, kind] : g.nodes) {
      const auto* nested = std::get_if<NestedNode>(&kind);
      if (!nested) continue;
      if (!d.graphs.count(nested->graph)) {
        out.push_back({DiagCode::E002, "nested graph '" + nested->graph + "' is not defined", gname, nid, ""});
      } else if (nesting_closure(d, nested->graph).count(gname) || nested->graph == gname) {
        out.push_back({DiagCode::E003, "nesting cycle through graph '" + nested->graph + "'", gname, nid, ""});
      }
    }
    for (const auto& [wid, w] : g.wires) {
      if (const auto* s = w.src_node(); s && !g.nodes.count(*s)) {
        out.push_back({DiagCode::E002, "source node '" + *s + "' does not exist", gname, "", wid});
      }
      if (const auto* t = w.dst_node(); t && !g.nodes.count(*t)) {
        out.push_back({DiagCode::E002, "target node '" + *t + "' does not exist", gname, "", wid});
      }
      if (const auto* in = std::get_if<InputBoundary>(&w.src); in && in->index >= g.n_inputs) {
        out.push_back({DiagCode::E004,
                       "input boundary " + std::to_string(in->index) + " out of range (n_inputs = " +
                           std::to_string(g.n_inputs) + ")",
                       gname, "", wid});
      }
      if (const auto* o = std::get_if<OutputBoundary>(&w.dst); o && o->index >= g.n_outputs) {
        out.push_back({DiagCode::E004,
                       "output boundary " + std::to_string(o->index) + " out of range (n_outputs = " +
                           std::to_string(g.n_outputs) + ")",
                       gname, "", wid});
      }
    }
  }
  std::sort(out.begin(), out.end(), diagnostic_less);
  return out;
}

// ---------------------------------------------------------------------------
// JSON codec

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& message) {
  throw LoadError(LoadError::Kind::Schema, pointer, "schema violation: " + message);
}

std::string escape_pointer_token(const std::string& token) {
  std::string out;
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

void only_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      schema_error(ptr + "/" + escape_pointer_token(key), "unexpected key '" + key + "'");
    }
  }
}

const json& member(const json& obj, const char* key, const std::string& ptr) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(ptr, std::string("missing key '") + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& ptr) {
  const json& v = member(obj, key, ptr);
  if (!v.is_string()) schema_error(ptr + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::string get_identifier(const json& obj, const char* key, const std::string& ptr) {
  std::string s = get_string(obj, key, ptr);
  if (!is_identifier(s)) schema_error(ptr + "/" + key, "'" + s + "' is not an identifier");
  return s;
}

std::size_t get_index(const json& v, const std::string& ptr) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    schema_error(ptr, "expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

const json& get_object(const json& obj, const char* key, const std::string& ptr) {
  const json& v = member(obj, key, ptr);
  if (!v.is_object()) schema_error(ptr + "/" + key, "expected an object");
  return v;
}

NodeKind node_from_json(const json& j, const std::string& ptr) {
  if (!j.is_object()) schema_error(ptr, "expected an object");
  std::string k = get_string(j, "k", ptr);
  if (k == "atomic") {
    only_keys(j, ptr, {"k", "tactic"});
    return AtomicNode{get_identifier(j, "tactic", ptr)};
  }
  if (k == "nested") {
    only_keys(j, ptr, {"k", "graph"});
    std::string g = get_string(j, "graph", ptr);
    if (g.empty()) schema_error(ptr + "/graph", "empty graph name");
    return NestedNode{g};
  }
  if (k == "identity") {
    only_keys(j, ptr, {"k"});
    return IdentityNode{};
  }
  if (k == "breakpoint") {
    only_keys(j, ptr, {"k"});
    return BreakpointNode{};
  }
  schema_error(ptr + "/k", "unknown node kind '" + k + "'");
}

WireSource source_from_json(const json& j, const std::string& ptr) {
  if (!j.is_object() || j.size() != 1) schema_error(ptr, "expected {\"node\":id} or {\"in\":index}");
  if (j.contains("node")) return NodeEnd{get_identifier(j, "node", ptr)};
  if (j.contains("in")) return InputBoundary{get_index(j["in"], ptr + "/in")};
  schema_error(ptr, "expected {\"node\":id} or {\"in\":index}");
}

WireTarget target_from_json(const json& j, const std::string& ptr) {
  if (!j.is_object() || j.size() != 1) schema_error(ptr, "expected {\"node\":id} or {\"out\":index}");
  if (j.contains("node")) return NodeEnd{get_identifier(j, "node", ptr)};
  if (j.contains("out")) return OutputBoundary{get_index(j["out"], ptr + "/out")};
  schema_error(ptr, "expected {\"node\":id} or {\"out\":index}");
}

PSGraph graph_from_json(const std::string& name, const json& j, const std::string& ptr) {
  if (!j.is_object()) schema_error(ptr, "expected an object");
  only_keys(j, ptr, {"n_inputs", "n_outputs", "nodes", "wires", "ui"});
  PSGraph g;
  g.name = name;
  g.n_inputs = get_index(member(j, "n_inputs", ptr), ptr + "/n_inputs");
  g.n_outputs = get_index(member(j, "n_outputs", ptr), ptr + "/n_outputs");
  const json& nodes = get_object(j, "nodes", ptr);
  for (const auto& [id, node] : nodes.items()) {
    std::string nptr = ptr + "/nodes/" + escape_pointer_token(id);
    if (!is_identifier(id)) schema_error(nptr, "node id '" + id + "' is not an identifier");
    g.nodes.emplace(id, node_from_json(node, nptr));
  }
  const json& wires = member(j, "wires", ptr);
  if (!wires.is_array()) schema_error(ptr + "/wires", "expected an array");
  for (std::size_t i = 0; i < wires.size(); ++i) {
    std::string wptr = ptr + "/wires/" + std::to_string(i);
    const json& w = wires[i];
    if (!w.is_object()) schema_error(wptr, "expected an object");
    only_keys(w, wptr, {"id", "src", "dst", "gt"});
    Wire wire;
    wire.id = get_identifier(w, "id", wptr);
    wire.src = source_from_json(member(w, "src", wptr), wptr + "/src");
    wire.dst = target_from_json(member(w, "dst", wptr), wptr + "/dst");
    std::string gt = get_string(w, "gt", wptr);
    try {
      wire.goal_type = parse_goaltype(gt);
    } catch (const GoalTypeError& e) {
      schema_error(wptr + "/gt", e.what());
    }
    if (g.wires.count(wire.id)) schema_error(wptr + "/id", "duplicate wire id '" + wire.id + "'");
    g.wires.emplace(wire.id, std::move(wire));
  }
  if (auto it = j.find("ui"); it != j.end()) g.ui = it->dump();
  return g;
}

json graph_to_json(const PSGraph& g) {
  json j = json::object();
  j["n_inputs"] = g.n_inputs;
  j["n_outputs"] = g.n_outputs;
  json nodes = json::object();
  for (const auto& [id, kind] : g.nodes) {
    json n = {{"k", node_kind_name(kind)}};
    if (const auto* a = std::get_if<AtomicNode>(&kind)) n["tactic"] = a->tactic;
    if (const auto* s = std::get_if<NestedNode>(&kind)) n["graph"] = s->graph;
    nodes[id] = std::move(n);
  }
  j["nodes"] = std::move(nodes);
  json wires = json::array();
  for (const auto& [id, w] : g.wires) {
    json src = std::holds_alternative<NodeEnd>(w.src) ? json{{"node", std::get<NodeEnd>(w.src).node}}
                                                      : json{{"in", std::get<InputBoundary>(w.src).index}};
    json dst = std::holds_alternative<NodeEnd>(w.dst) ? json{{"node", std::get<NodeEnd>(w.dst).node}}
                                                      : json{{"out", std::get<OutputBoundary>(w.dst).index}};
    wires.push_back({{"id", id}, {"src", std::move(src)}, {"dst", std::move(dst)}, {"gt", pretty(w.goal_type)}});
  }
  j["wires"] = std::move(wires);
  if (g.ui) j["ui"] = json::parse(*g.ui);
  return j;
}

}  // namespace

GraphDocument load_document(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw LoadError(LoadError::Kind::Json, "", std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) schema_error("", "expected a top-level object");
  only_keys(j, "", {"version", "main", "graphs", "ui"});
  if (auto it = j.find("version"); it != j.end() && *it != 1) schema_error("/version", "unsupported version");
  GraphDocument d;
  d.main = get_string(j, "main", "");
  const json& graphs = get_object(j, "graphs", "");
  for (const auto& [name, g] : graphs.items()) {
    std::string gptr = "/graphs/" + escape_pointer_token(name);
    if (name.empty()) schema_error(gptr, "empty graph name");
    d.graphs.emplace(name, graph_from_json(name, g, gptr));
  }
  if (auto it = j.find("ui"); it != j.end()) d.ui = it->dump();
  auto diags = structural_diagnostics(d);
  if (!diags.empty()) {
    std::string message = "invalid document: " + diags.front().str();
    throw LoadError(LoadError::Kind::Invariant, "", message, std::move(diags));
  }
  return d;
}

std::string save_document(const GraphDocument& d) {
  json j = json::object();
  j["version"] = 1;
  j["main"] = d.main;
  json graphs = json::object();
  for (const auto& [name, g] : d.graphs) graphs[name] = graph_to_json(g);
  j["graphs"] = std::move(graphs);
  if (d.ui) j["ui"] = json::parse(*d.ui);
  return j.dump(2) + "\n";
}

std::string canonicalize(std::string_view bytes) { return save_document(load_document(bytes)); }

GraphDocument load_document_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_document(ss.str());
}

void save_document_file(const GraphDocument& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out << save_document(d);
}

// ---------------------------------------------------------------------------
// Breakpoints

namespace {

std::string unused_name(const std::string& base, const auto& taken) {
  if (!taken.count(base)) return base;
  for (std::size_t i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!taken.count(candidate)) return candidate;
  }
}

bool is_breakpoint(const PSGraph& g, const std::string* node) {
  if (!node) return false;
  auto it = g.nodes.find(*node);
  return it != g.nodes.end() && std::holds_alternative<BreakpointNode>(it->second);
}

}  // namespace

BreakpointEdit toggle_breakpoint(PSGraph& g, const std::string& wire_id) {
  auto it = g.wires.find(wire_id);
  if (it == g.wires.end()) throw std::out_of_range("no wire '" + wire_id + "' in graph '" + g.name + "'");
  Wire& w = it->second;

  auto single = [&](const std::string& node) {
    if (g.in_wires(node).size() != 1 || g.out_wires(node).size() != 1) {
      throw std::invalid_argument("breakpoint '" + node + "' joins several wires and cannot be removed by toggling");
    }
  };

  if (is_breakpoint(g, w.dst_node())) {
    std::string bp = *w.dst_node();
    single(bp);
    Wire down = *g.out_wires(bp).front();
    w.dst = down.dst;
    g.wires.erase(down.id);
    g.nodes.erase(bp);
    return {false, bp, wire_id, down.id};
  }
  if (is_breakpoint(g, w.src_node())) {
    std::string bp = *w.src_node();
    single(bp);
    std::string up_id = g.in_wires(bp).front()->id;
    WireTarget dst = w.dst;
    g.wires.erase(wire_id);
    g.wires.at(up_id).dst = dst;
    g.nodes.erase(bp);
    return {false, bp, up_id, wire_id};
  }

  std::string bp = unused_name("bp_" + wire_id, g.nodes);
  std::string down = unused_name(wire_id + "_bp", g.wires);
  Wire tail{down, NodeEnd{bp}, w.dst, w.goal_type};
  w.dst = NodeEnd{bp};
  g.nodes.emplace(bp, BreakpointNode{});
  g.wires.emplace(down, std::move(tail));
  return {true, bp, wire_id, down};
}

}  // namespace psg
