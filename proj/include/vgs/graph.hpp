#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vgs/model.hpp"

namespace vgs::graph {

enum class ComponentKind { ejector, hose, reservoir, suction_cup, distributor, sensor };

const char* kind_name(ComponentKind kind);

/// One declared component. Parameters are stored name -> numeric value
/// (booleans as 0/1); presence and ranges are checked per kind.
struct Component {
    std::string id;
    ComponentKind kind = ComponentKind::reservoir;
    std::map<std::string, double> params;
    int line = 0;
};

struct Connection {
    std::string a_id, a_port;
    std::string b_id, b_port;
    int line = 0;
};

enum class IoDirection { input, output };

struct IoBinding {
    IoDirection direction = IoDirection::input;
    std::string name;      // external signal name
    std::string component; // target component id
    std::string port;      // component port (e.g. "suction", "vacuum")
    std::vector<double> values; // declared alphabet for inputs
    int line = 0;
};

struct SolverConfig {
    double dt = 1e-4;       // RK4 substep, s
    double max_step = 1e-3; // upper bound for a single RK4 step, s
};

/// Declarative description of a vacuum-gripping system: components,
/// parameters, pneumatic connections and external I/O bindings.
struct SystemGraph {
    int format_version = 1;
    SolverConfig solver;
    std::vector<Component> components;
    std::vector<Connection> connections;
    std::vector<IoBinding> io;

    const Component* find_component(const std::string& id) const;
};

/// Parse the sectioned text format ([components], [connections], [io],
/// optional [solver]). Throws ParseError with line:column on syntax errors,
/// unknown component kinds, unknown or missing parameters.
SystemGraph parse_graph(const std::string& document);
SystemGraph parse_graph_file(const std::string& path);

/// Machine-readable invariant violation; an empty list means the graph is
/// valid for assembly.
struct Violation {
    std::string code;
    std::string message;
};

std::vector<Violation> validate_graph(const SystemGraph& g);

/// Component parameters with every default materialized — the parameter set
/// the assembled model actually uses.
std::map<std::string, double> resolved_params(const Component& c);

/// Instantiate the graph as an executable detailed model. Requires
/// validate_graph(g) to be empty; parameter values outside their physical
/// range raise ModelError.
std::unique_ptr<DetailedModel> assemble(const SystemGraph& g);

} // namespace vgs::graph
