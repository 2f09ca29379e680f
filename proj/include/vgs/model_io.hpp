#pragma once

#include <string>

#include "vgs/explorer.hpp"
#include "vgs/graph.hpp"
#include "vgs/machine.hpp"
#include "vgs/trace.hpp"

namespace vgs::io {

// All documents are JSON with a format_version field and deterministic key
// order; numbers are written as shortest round-trip decimals, so a
// save/load pair reproduces every value bit-exactly.

std::string save_machine(const machine::AbstractMachine& m, const std::string& note = "");
machine::AbstractMachine load_machine(const std::string& document);

std::string save_discovery(const explore::DiscoveryResult& d, const std::string& note = "");
explore::DiscoveryResult load_discovery(const std::string& document);

/// CSV with a `# key: value` comment preamble and a `time_s,<name>,...`
/// header. Values round-trip losslessly.
std::string write_trace_csv(const Trace& t);
Trace read_trace_csv(const std::string& text);

/// Deterministic DOT rendering: one node per state (plus intermediate boxes
/// at depths 2 and 3), one edge per guard. Identical inputs yield
/// byte-identical text.
std::string export_dot(const explore::DiscoveryResult& d);
std::string export_dot(const machine::AbstractMachine& m);

/// Human-readable check report of an assembled model.
std::string describe_model_json(const DetailedModel& model);

/// Everything needed to reconstruct and run the detailed model: the graph
/// document, the resolved component parameters, the solver configuration
/// and the expanded state-vector layout. Its byte size is the depth-4
/// artifact size reported by the benchmark harness.
std::string model_bundle_json(const DetailedModel& model, const graph::SystemGraph& g,
                              const std::string& graph_text);

/// Exploration config <-> JSON (used by the C API and the CLI config file).
std::string exploration_config_to_json(const explore::ExplorationConfig& cfg);
explore::ExplorationConfig exploration_config_from_json(const std::string& json_text);

/// Input script <-> JSON.
std::string script_to_json(const InputScript& script);
InputScript script_from_json(const std::string& json_text);

} // namespace vgs::io
