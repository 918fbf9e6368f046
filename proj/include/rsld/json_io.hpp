#pragma once

#include "rsld/engine.hpp"

#include <json.hpp>

#include <string>

namespace rsld {

/// Trace schema: {mode, rule, initial, status, prune?, steps: [{index,
/// selected:{atom, priority}, clause, mgu, reduction|null, resolvent,
/// resultant:{reduced, instance}}]}.
nlohmann::json trace_json(const DerivationRecord& d, const Rule& rule);

/// Structural validation of the trace schema; returns an error description
/// or empty string.
std::string validate_trace(const nlohmann::json& trace);

std::string render_text_trace(const DerivationRecord& d);

/// Graphviz export; pruned and truncated nodes are styled distinctly.
std::string render_dot(const DerivationTree& tree);

} // namespace rsld
