#include "vgs/model_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace vgs::io {

using nlohmann::json;

namespace {

constexpr int format_version = 1;

std::string shortest(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& text, const std::string& where) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw IoError(where + ": expected a number, got '" + text + "'");
    return value;
}

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw SchemaError(path, what);
}

const json& require(const json& doc, const std::string& key, const std::string& path) {
    auto it = doc.find(key);
    if (it == doc.end())
        schema_fail(path + "/" + key, "missing");
    return *it;
}

double require_number(const json& doc, const std::string& key, const std::string& path) {
    const json& v = require(doc, key, path);
    if (!v.is_number())
        schema_fail(path + "/" + key, "expected a number");
    return v.get<double>();
}

int require_int(const json& doc, const std::string& key, const std::string& path) {
    const json& v = require(doc, key, path);
    if (!v.is_number_integer())
        schema_fail(path + "/" + key, "expected an integer");
    return v.get<int>();
}

std::string require_string(const json& doc, const std::string& key, const std::string& path) {
    const json& v = require(doc, key, path);
    if (!v.is_string())
        schema_fail(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

const json& require_array(const json& doc, const std::string& key, const std::string& path) {
    const json& v = require(doc, key, path);
    if (!v.is_array())
        schema_fail(path + "/" + key, "expected an array");
    return v;
}

std::vector<double> number_array(const json& v, const std::string& path) {
    if (!v.is_array())
        schema_fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            schema_fail(path + "/" + std::to_string(i), "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

json parse_document(const std::string& text, const std::string& expected_kind) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed document: ") + e.what());
    }
    if (!doc.is_object())
        schema_fail("", "expected an object");
    const int version = require_int(doc, "format_version", "");
    if (version != format_version)
        throw IoError("unsupported format_version " + std::to_string(version) + ", expected " +
                      std::to_string(format_version));
    if (require_string(doc, "kind", "") != expected_kind)
        schema_fail("/kind", "expected '" + expected_kind + "'");
    return doc;
}

json signature_to_json(const IoSignature& sig) {
    json arr = json::array();
    for (const auto& s : sig) {
        json e;
        e["name"] = s.name;
        e["kind"] = s.kind == SignalKind::discrete ? "discrete" : "continuous";
        if (!s.values.empty())
            e["values"] = s.values;
        arr.push_back(std::move(e));
    }
    return arr;
}

IoSignature signature_from_json(const json& arr, const std::string& path) {
    if (!arr.is_array())
        schema_fail(path, "expected an array");
    IoSignature sig;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        if (!arr[i].is_object())
            schema_fail(p, "expected an object");
        SignalSpec s;
        s.name = require_string(arr[i], "name", p);
        const std::string kind = require_string(arr[i], "kind", p);
        if (kind == "discrete")
            s.kind = SignalKind::discrete;
        else if (kind == "continuous")
            s.kind = SignalKind::continuous;
        else
            schema_fail(p + "/kind", "expected 'discrete' or 'continuous'");
        if (arr[i].contains("values"))
            s.values = number_array(arr[i]["values"], p + "/values");
        sig.push_back(std::move(s));
    }
    return sig;
}

json transition_to_json(const machine::MachineTransition& t, machine::MdtLevel level) {
    json e;
    e["start"] = t.start_state;
    e["guard"] = t.guard;
    e["target"] = t.target_state;
    if (t.start_state != 0 && level != machine::MdtLevel::mdt1) {
        e["delays_ms"] = t.delays_ms;
        if (level == machine::MdtLevel::mdt3)
            e["trajectories"] = t.trajectories;
    }
    return e;
}

machine::MachineTransition transition_from_json(const json& e, machine::MdtLevel level, int id,
                                                const std::string& path) {
    if (!e.is_object())
        schema_fail(path, "expected an object");
    machine::MachineTransition t;
    t.id = id;
    t.start_state = require_int(e, "start", path);
    t.guard = number_array(require(e, "guard", path), path + "/guard");
    t.target_state = require_int(e, "target", path);
    if (t.start_state != 0 && level != machine::MdtLevel::mdt1) {
        t.delays_ms = number_array(require(e, "delays_ms", path), path + "/delays_ms");
        if (level == machine::MdtLevel::mdt3) {
            const json& trajs = require_array(e, "trajectories", path);
            for (std::size_t j = 0; j < trajs.size(); ++j)
                t.trajectories.push_back(
                    number_array(trajs[j], path + "/trajectories/" + std::to_string(j)));
        }
    }
    return t;
}

} // namespace

std::string save_machine(const machine::AbstractMachine& m, const std::string& note) {
    json doc;
    doc["format_version"] = format_version;
    doc["kind"] = "machine";
    doc["level"] = static_cast<int>(m.level);
    doc["cycle_s"] = m.cycle_s;
    doc["inputs"] = signature_to_json(m.inputs);
    doc["outputs"] = signature_to_json(m.outputs);
    json states = json::array();
    for (const auto& s : m.states) {
        json e;
        e["id"] = s.id;
        e["outputs"] = s.outputs;
        states.push_back(std::move(e));
    }
    doc["states"] = std::move(states);
    doc["initial"] = transition_to_json(m.initial, m.level);
    json transitions = json::array();
    for (const auto& t : m.transitions)
        transitions.push_back(transition_to_json(t, m.level));
    doc["transitions"] = std::move(transitions);
    doc["provenance"]["model_hash"] = m.model_hash;
    doc["provenance"]["config_hash"] = m.config_hash;
    if (!note.empty())
        doc["provenance"]["note"] = note;
    return doc.dump() + "\n";
}

machine::AbstractMachine load_machine(const std::string& document) {
    const json doc = parse_document(document, "machine");
    machine::AbstractMachine m;
    m.level = machine::level_from_int(require_int(doc, "level", ""));
    m.cycle_s = require_number(doc, "cycle_s", "");
    m.inputs = signature_from_json(require(doc, "inputs", ""), "/inputs");
    m.outputs = signature_from_json(require(doc, "outputs", ""), "/outputs");
    const json& states = require_array(doc, "states", "");
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string p = "/states/" + std::to_string(i);
        machine::MachineState s;
        s.id = require_int(states[i], "id", p);
        s.outputs = number_array(require(states[i], "outputs", p), p + "/outputs");
        m.states.push_back(std::move(s));
    }
    m.initial = transition_from_json(require(doc, "initial", ""), m.level, -1, "/initial");
    const json& transitions = require_array(doc, "transitions", "");
    for (std::size_t i = 0; i < transitions.size(); ++i)
        m.transitions.push_back(transition_from_json(transitions[i], m.level,
                                                     static_cast<int>(i),
                                                     "/transitions/" + std::to_string(i)));
    const json& prov = require(doc, "provenance", "");
    m.model_hash = require_string(prov, "model_hash", "/provenance");
    m.config_hash = require_string(prov, "config_hash", "/provenance");
    try {
        m.validate();
    } catch (const Error& e) {
        throw IoError(std::string("machine document is inconsistent: ") + e.what());
    }
    return m;
}

std::string exploration_config_to_json(const explore::ExplorationConfig& cfg) {
    json doc;
    json inputs = json::array();
    for (const auto& [name, values] : cfg.input_values) {
        json e;
        e["name"] = name;
        e["values"] = values;
        inputs.push_back(std::move(e));
    }
    doc["inputs"] = std::move(inputs);
    doc["settle_time_s"] = cfg.settle_time_s;
    doc["sample_cycle_s"] = cfg.sample_cycle_s;
    doc["stability_window_s"] = cfg.stability_window_s;
    doc["default_tolerance"] = cfg.default_tolerance;
    if (!cfg.tolerances.empty())
        doc["tolerances"] = cfg.tolerances;
    doc["max_states"] = cfg.max_states;
    return doc.dump(2) + "\n";
}

explore::ExplorationConfig exploration_config_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed exploration config: ") + e.what());
    }
    explore::ExplorationConfig cfg;
    if (doc.contains("inputs")) {
        const json& inputs = doc["inputs"];
        if (!inputs.is_array())
            throw ConfigError("exploration config: inputs must be an array");
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const std::string p = "/inputs/" + std::to_string(i);
            cfg.input_values.emplace_back(require_string(inputs[i], "name", p),
                                          number_array(require(inputs[i], "values", p),
                                                       p + "/values"));
        }
    }
    if (doc.contains("settle_time_s"))
        cfg.settle_time_s = doc["settle_time_s"].get<double>();
    if (doc.contains("sample_cycle_s"))
        cfg.sample_cycle_s = doc["sample_cycle_s"].get<double>();
    if (doc.contains("stability_window_s"))
        cfg.stability_window_s = doc["stability_window_s"].get<double>();
    if (doc.contains("default_tolerance"))
        cfg.default_tolerance = doc["default_tolerance"].get<double>();
    if (doc.contains("tolerances"))
        for (const auto& [name, tol] : doc["tolerances"].items())
            cfg.tolerances[name] = tol.get<double>();
    if (doc.contains("max_states"))
        cfg.max_states = doc["max_states"].get<int>();
    cfg.validate();
    return cfg;
}

std::string save_discovery(const explore::DiscoveryResult& d, const std::string& note) {
    json doc;
    doc["format_version"] = format_version;
    doc["kind"] = "discovery";
    doc["inputs"] = signature_to_json(d.inputs);
    doc["outputs"] = signature_to_json(d.outputs);
    doc["config"] = json::parse(exploration_config_to_json(d.config));
    doc["evaluations"] = d.evaluations;
    json states = json::array();
    for (const auto& s : d.states) {
        json e;
        e["id"] = s.number;
        e["outputs"] = s.stable_outputs;
        e["reach"] = s.reach_sequence;
        states.push_back(std::move(e));
    }
    doc["states"] = std::move(states);
    json transitions = json::array();
    for (const auto& t : d.transitions) {
        json e;
        e["start"] = t.start_state;
        e["guard"] = t.input_values;
        e["target"] = t.target_state;
        e["settle_ms"] = t.settle_ms;
        e["trajectories"] = t.trajectories;
        transitions.push_back(std::move(e));
    }
    doc["transitions"] = std::move(transitions);
    doc["provenance"]["model_hash"] = d.model_hash;
    doc["provenance"]["config_hash"] = d.config_hash;
    if (!note.empty())
        doc["provenance"]["note"] = note;
    return doc.dump() + "\n";
}

explore::DiscoveryResult load_discovery(const std::string& document) {
    const json doc = parse_document(document, "discovery");
    explore::DiscoveryResult d;
    d.inputs = signature_from_json(require(doc, "inputs", ""), "/inputs");
    d.outputs = signature_from_json(require(doc, "outputs", ""), "/outputs");
    d.config = exploration_config_from_json(require(doc, "config", "").dump());
    d.evaluations = require_int(doc, "evaluations", "");
    const json& states = require_array(doc, "states", "");
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string p = "/states/" + std::to_string(i);
        explore::StateRecord s;
        s.number = require_int(states[i], "id", p);
        s.stable_outputs = number_array(require(states[i], "outputs", p), p + "/outputs");
        const json& reach = require_array(states[i], "reach", p);
        for (std::size_t k = 0; k < reach.size(); ++k)
            s.reach_sequence.push_back(number_array(reach[k], p + "/reach/" + std::to_string(k)));
        d.states.push_back(std::move(s));
    }
    const json& transitions = require_array(doc, "transitions", "");
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const std::string p = "/transitions/" + std::to_string(i);
        explore::TransitionRecord t;
        t.start_state = require_int(transitions[i], "start", p);
        t.input_values = number_array(require(transitions[i], "guard", p), p + "/guard");
        t.target_state = require_int(transitions[i], "target", p);
        t.settle_ms = number_array(require(transitions[i], "settle_ms", p), p + "/settle_ms");
        const json& trajs = require_array(transitions[i], "trajectories", p);
        for (std::size_t j = 0; j < trajs.size(); ++j)
            t.trajectories.push_back(
                number_array(trajs[j], p + "/trajectories/" + std::to_string(j)));
        d.transitions.push_back(std::move(t));
    }
    const json& prov = require(doc, "provenance", "");
    d.model_hash = require_string(prov, "model_hash", "/provenance");
    d.config_hash = require_string(prov, "config_hash", "/provenance");
    try {
        d.validate();
    } catch (const Error& e) {
        throw IoError(std::string("discovery document is inconsistent: ") + e.what());
    }
    return d;
}

std::string write_trace_csv(const Trace& t) {
    t.validate();
    std::ostringstream out;
    out << "# vgs-trace " << format_version << "\n";
    if (!t.source.empty())
        out << "# source: " << t.source << "\n";
    out << "# period_s: " << shortest(t.period_s) << "\n";
    for (const auto& w : t.warnings)
        out << "# warning: " << w << "\n";
    out << "time_s";
    for (const auto& name : t.signals)
        out << "," << name;
    out << "\n";
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        out << shortest(t.times[i]);
        for (double v : t.rows[i])
            out << "," << shortest(v);
        out << "\n";
    }
    return out.str();
}

Trace read_trace_csv(const std::string& text) {
    Trace t;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const std::string body = line.substr(1);
            auto colon = body.find(':');
            if (colon != std::string::npos) {
                std::string key = body.substr(0, colon);
                std::string value = body.substr(colon + 1);
                while (!key.empty() && key.front() == ' ')
                    key.erase(key.begin());
                while (!value.empty() && value.front() == ' ')
                    value.erase(value.begin());
                if (key == "source")
                    t.source = value;
                else if (key == "period_s")
                    t.period_s = parse_double(value, "line " + std::to_string(line_no));
                else if (key == "warning")
                    t.warnings.push_back(value);
            }
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream row(line);
        while (std::getline(row, cell, ','))
            cells.push_back(cell);
        if (!header_seen) {
            if (cells.empty() || cells[0] != "time_s")
                throw IoError("line " + std::to_string(line_no) +
                              ": expected header 'time_s,<name>,...'");
            t.signals.assign(cells.begin() + 1, cells.end());
            header_seen = true;
            continue;
        }
        if (cells.size() != t.signals.size() + 1)
            throw IoError("line " + std::to_string(line_no) + ": ragged row, expected " +
                          std::to_string(t.signals.size() + 1) + " cells");
        const std::string where = "line " + std::to_string(line_no);
        const double time = parse_double(cells[0], where);
        if (!t.times.empty() && time <= t.times.back())
            throw IoError(where + ": non-increasing time " + cells[0]);
        std::vector<double> values;
        values.reserve(cells.size() - 1);
        for (std::size_t i = 1; i < cells.size(); ++i)
            values.push_back(parse_double(cells[i], where));
        t.times.push_back(time);
        t.rows.push_back(std::move(values));
    }
    if (!header_seen)
        throw IoError("trace CSV has no header line");
    return t;
}

namespace {

std::string display(double v) {
    // Stable short label formatting for DOT output.
    double rounded = std::round(v);
    if (std::abs(v - rounded) < 1e-9 && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", rounded);
        return buf;
    }
    return shortest(v);
}

std::string joined(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out += ", ";
        out += display(values[i]);
    }
    return out;
}

} // namespace

std::string export_dot(const explore::DiscoveryResult& d) {
    std::ostringstream out;
    out << "digraph discovery {\n  rankdir=LR;\n  __init [shape=point, label=\"\"];\n";
    for (const auto& s : d.states)
        out << "  s" << s.number << " [shape=circle, label=\"" << s.number << "\\n"
            << joined(s.stable_outputs) << "\"];\n";
    for (const auto& t : d.transitions) {
        const std::string from = t.start_state == 0 ? "__init" : "s" + std::to_string(t.start_state);
        out << "  " << from << " -> s" << t.target_state << " [label=\"" << joined(t.input_values);
        if (t.start_state != 0)
            out << "\\n" << joined(t.settle_ms) << " ms";
        out << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string export_dot(const machine::AbstractMachine& m) {
    std::ostringstream out;
    out << "digraph mdt" << static_cast<int>(m.level)
        << " {\n  rankdir=LR;\n  __init [shape=point, label=\"\"];\n";
    for (const auto& s : m.states)
        out << "  s" << s.id << " [shape=circle, label=\"" << s.id << "\\n" << joined(s.outputs)
            << "\"];\n";
    if (m.level != machine::MdtLevel::mdt1)
        for (const auto& t : m.transitions)
            out << "  i" << t.id << " [shape=box, label=\"" << joined(t.delays_ms) << " ms\"];\n";
    out << "  __init -> s" << m.initial.target_state << " [label=\"" << joined(m.initial.guard)
        << "\"];\n";
    for (const auto& t : m.transitions) {
        if (m.level == machine::MdtLevel::mdt1) {
            out << "  s" << t.start_state << " -> s" << t.target_state << " [label=\""
                << joined(t.guard) << "\"];\n";
        } else {
            out << "  s" << t.start_state << " -> i" << t.id << " [label=\"" << joined(t.guard)
                << "\"];\n";
            out << "  i" << t.id << " -> s" << t.target_state << " [label=\""
                << display(t.max_delay_ms()) << " ms\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string describe_model_json(const DetailedModel& model) {
    json doc;
    doc["inputs"] = signature_to_json(model.input_signature());
    doc["outputs"] = signature_to_json(model.output_signature());
    doc["nodes"] = model.network().nodes.size();
    doc["resistors"] = model.network().resistors.size();
    doc["total_volume_m3"] = model.total_volume();
    doc["solver_dt_s"] = model.solver_dt_s();
    doc["content_hash"] = model.content_hash();
    return doc.dump(2) + "\n";
}

std::string model_bundle_json(const DetailedModel& model, const graph::SystemGraph& g,
                              const std::string& graph_text) {
    json doc;
    doc["format_version"] = format_version;
    doc["kind"] = "mdt4_bundle";
    doc["graph_document"] = graph_text;
    doc["solver"]["dt_s"] = g.solver.dt;
    doc["solver"]["max_step_s"] = g.solver.max_step;
    doc["solver"]["integrator"] = "rk4";

    json params = json::array();
    for (const auto& c : g.components) {
        json e;
        e["id"] = c.id;
        e["kind"] = graph::kind_name(c.kind);
        e["params"] = graph::resolved_params(c);
        params.push_back(std::move(e));
    }
    doc["parameters"] = std::move(params);

    const auto& net = model.network();
    json layout;
    json nodes = json::array();
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        json e;
        e["index"] = i;
        e["name"] = net.nodes[i].name;
        e["volume_m3"] = net.nodes[i].volume_m3;
        e["initial_pa"] = atmosphere_pa;
        json links = json::array();
        for (const auto& r : net.resistors) {
            if (r.node_a != static_cast<int>(i) && r.node_b != static_cast<int>(i))
                continue;
            const int peer = r.node_a == static_cast<int>(i) ? r.node_b : r.node_a;
            json link;
            link["peer"] = peer < 0 ? json(nullptr) : json(net.nodes[peer].name);
            link["resistance_pa_s_per_m3"] = r.resistance;
            links.push_back(std::move(link));
        }
        e["links"] = std::move(links);
        nodes.push_back(std::move(e));
    }
    layout["state_vector"] = std::move(nodes);
    for (const auto& e : net.ejectors) {
        layout["generator"]["node"] = net.nodes[e.node].name;
        layout["generator"]["s_max_m3_s"] = e.params.s_max;
        layout["generator"]["pv_max_mbar"] = e.params.pv_max;
        layout["generator"]["blow_flow_m3_s"] = e.params.blow_flow;
        layout["generator"]["blow_overpressure_mbar"] = e.params.blow_overpressure;
        layout["generator"]["check_valve"] = e.params.has_check_valve;
    }
    json leaks = json::array();
    for (const auto& l : net.leaks) {
        json e;
        e["node"] = net.nodes[l.node].name;
        e["coefficient_m3_s_pa"] = l.coefficient;
        leaks.push_back(std::move(e));
    }
    layout["leaks"] = std::move(leaks);
    json outputs = json::array();
    for (const auto& b : model.output_bindings()) {
        json e;
        e["name"] = b.name;
        e["node"] = net.nodes[b.node].name;
        e["role"] = b.role == OutputRole::vacuum ? "vacuum"
                    : b.role == OutputRole::h2   ? "h2"
                                                 : "pdi_byte";
        e["resolution_mbar"] = b.resolution;
        e["thresholds"] = {{"h2", b.thresholds.h2},
                           {"h3", b.thresholds.h3},
                           {"h4", b.thresholds.h4},
                           {"h5", b.thresholds.h5}};
        outputs.push_back(std::move(e));
    }
    layout["outputs"] = std::move(outputs);
    doc["layout"] = std::move(layout);
    doc["inputs"] = signature_to_json(model.input_signature());
    doc["content_hash"] = model.content_hash();
    return doc.dump() + "\n";
}

std::string script_to_json(const InputScript& script) {
    json doc;
    doc["duration_s"] = script.duration_s;
    json steps = json::array();
    for (const auto& s : script.steps) {
        json e;
        e["t"] = s.t;
        json values;
        for (const auto& [name, v] : s.values)
            values[name] = v;
        e["values"] = std::move(values);
        steps.push_back(std::move(e));
    }
    doc["steps"] = std::move(steps);
    return doc.dump(2) + "\n";
}

InputScript script_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed script: ") + e.what());
    }
    InputScript script;
    script.duration_s = require_number(doc, "duration_s", "");
    if (doc.contains("steps")) {
        const json& steps = doc["steps"];
        if (!steps.is_array())
            throw ConfigError("script steps must be an array");
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const std::string p = "/steps/" + std::to_string(i);
            ScriptStep step;
            step.t = require_number(steps[i], "t", p);
            const json& values = require(steps[i], "values", p);
            if (!values.is_object())
                throw ConfigError("script step values must be an object");
            for (const auto& [name, v] : values.items())
                step.values.emplace_back(name, v.get<double>());
            script.steps.push_back(std::move(step));
        }
    }
    script.validate();
    return script;
}

} // namespace vgs::io
