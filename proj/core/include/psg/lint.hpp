// Static checks over a graph document.
#pragma once

#include <vector>

#include "psg/graph.hpp"
#include "psg/prover.hpp"

namespace psg {

/// All diagnostics, sorted by (graph, code, location). Empty means clean.
std::vector<Diagnostic> lint(const GraphDocument& d, const TacticRegistry& reg);

bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace psg
