// PSGraph documents: typed nodes, goal-typed wires, boundaries, nesting.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "psg/goal_type.hpp"

namespace psg {

struct AtomicNode {
  std::string tactic;
  friend bool operator==(const AtomicNode&, const AtomicNode&) = default;
};
struct NestedNode {
  std::string graph;
  friend bool operator==(const NestedNode&, const NestedNode&) = default;
};
struct IdentityNode {
  friend bool operator==(const IdentityNode&, const IdentityNode&) = default;
};
struct BreakpointNode {
  friend bool operator==(const BreakpointNode&, const BreakpointNode&) = default;
};

using NodeKind = std::variant<AtomicNode, NestedNode, IdentityNode, BreakpointNode>;

struct NodeEnd {
  std::string node;
  friend bool operator==(const NodeEnd&, const NodeEnd&) = default;
};
struct InputBoundary {
  std::size_t index = 0;
  friend bool operator==(const InputBoundary&, const InputBoundary&) = default;
};
struct OutputBoundary {
  std::size_t index = 0;
  friend bool operator==(const OutputBoundary&, const OutputBoundary&) = default;
};

using WireSource = std::variant<NodeEnd, InputBoundary>;
using WireTarget = std::variant<NodeEnd, OutputBoundary>;

struct Wire {
  std::string id;
  WireSource src;
  WireTarget dst;
  GoalType goal_type;

  const std::string* src_node() const;
  const std::string* dst_node() const;

  friend bool operator==(const Wire&, const Wire&) = default;
};

struct PSGraph {
  std::string name;
  std::map<std::string, NodeKind> nodes;
  std::map<std::string, Wire> wires;  // keyed (and therefore ordered) by wire id
  std::size_t n_inputs = 0;
  std::size_t n_outputs = 0;
  std::optional<std::string> ui;  // opaque editor payload, compact JSON text

  void add_wire(Wire w);
  /// Out-wires of a node, ordered by wire id.
  std::vector<const Wire*> out_wires(const std::string& node) const;
  std::vector<const Wire*> in_wires(const std::string& node) const;
  std::vector<const Wire*> input_wires() const;
  const Wire& wire(const std::string& id) const;
  const NodeKind& node(const std::string& id) const;

  friend bool operator==(const PSGraph&, const PSGraph&) = default;
};

struct GraphDocument {
  std::string main;
  std::map<std::string, PSGraph> graphs;
  std::optional<std::string> ui;

  const PSGraph& graph(const std::string& name) const;
  const PSGraph& main_graph() const { return graph(main); }

  friend bool operator==(const GraphDocument&, const GraphDocument&) = default;
};

std::string node_kind_name(const NodeKind& k);

// ---------------------------------------------------------------------------
// Diagnostics

enum class DiagCode { E001, E002, E003, E004, E005, W001 };
enum class Severity { Error, Warning };

std::string_view code_name(DiagCode c);
Severity severity_of(DiagCode c);

struct Diagnostic {
  DiagCode code;
  std::string message;
  std::string graph;
  std::string node;  // empty when the location is a wire or the graph itself
  std::string wire;

  Severity severity() const { return severity_of(code); }
  std::string location() const;
  std::string str() const;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Sort key: graph, code, location.
bool diagnostic_less(const Diagnostic& a, const Diagnostic& b);

// ---------------------------------------------------------------------------
// File format

class LoadError : public std::runtime_error {
 public:
  enum class Kind { Json, Schema, Invariant };

  LoadError(Kind kind, std::string pointer, const std::string& message, std::vector<Diagnostic> diags = {});

  Kind kind() const { return kind_; }
  /// JSON pointer to the offending value (schema errors).
  const std::string& pointer() const { return pointer_; }
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  Kind kind_;
  std::string pointer_;
  std::vector<Diagnostic> diagnostics_;
};

GraphDocument load_document(std::string_view bytes);
std::string save_document(const GraphDocument& d);
std::string canonicalize(std::string_view bytes);

GraphDocument load_document_file(const std::string& path);
void save_document_file(const GraphDocument& d, const std::string& path);

/// Structural invariants (dangling references, nesting cycles, boundary indices).
std::vector<Diagnostic> structural_diagnostics(const GraphDocument& d);

/// True iff the graph-nesting relation has a cycle.
bool has_nesting_cycle(const GraphDocument& d);

// ---------------------------------------------------------------------------
// Breakpoint editing

struct BreakpointEdit {
  bool inserted = false;
  std::string node;        // breakpoint node added or removed
  std::string upstream;    // wire that survives and ends at the breakpoint (insert) / merged wire (remove)
  std::string downstream;  // wire created (insert) / removed (remove)
};

/// Splices a breakpoint into `wire`, or removes the breakpoint the wire touches.
/// The upstream half keeps the original id, so goals on it stay upstream.
BreakpointEdit toggle_breakpoint(PSGraph& g, const std::string& wire);

}  // namespace psg
