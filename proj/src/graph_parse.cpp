#include "vgs/graph.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace vgs::graph {

namespace {

struct ParamSpec {
    const char* name;
    bool required;
};

// Parameter vocabulary per component kind. Unknown keys are rejected at
// parse time so typos surface early.
const std::vector<ParamSpec>& params_for(ComponentKind kind) {
    static const std::vector<ParamSpec> ejector = {
        {"s_max", true},        {"pv_max", true},         {"blow_flow", false},
        {"blow_overpressure", false}, {"check_valve", false}, {"plenum_volume", false},
        {"h2", false},          {"h3", false},            {"h4", false},
        {"h5", false},          {"resolution", false},
    };
    static const std::vector<ParamSpec> hose = {
        {"length", true}, {"inner_diameter", true}, {"segments", false}, {"viscosity", false},
    };
    static const std::vector<ParamSpec> reservoir = {{"volume", true}};
    static const std::vector<ParamSpec> suction_cup = {{"volume", true}, {"leak", false}};
    static const std::vector<ParamSpec> distributor = {{"volume", false}};
    static const std::vector<ParamSpec> sensor = {
        {"resolution", false}, {"h2", false}, {"h3", false}, {"h4", false}, {"h5", false},
    };
    switch (kind) {
    case ComponentKind::ejector: return ejector;
    case ComponentKind::hose: return hose;
    case ComponentKind::reservoir: return reservoir;
    case ComponentKind::suction_cup: return suction_cup;
    case ComponentKind::distributor: return distributor;
    case ComponentKind::sensor: return sensor;
    }
    return reservoir;
}

bool parse_kind(const std::string& word, ComponentKind& out) {
    if (word == "ejector") out = ComponentKind::ejector;
    else if (word == "hose") out = ComponentKind::hose;
    else if (word == "reservoir") out = ComponentKind::reservoir;
    else if (word == "suction_cup") out = ComponentKind::suction_cup;
    else if (word == "distributor") out = ComponentKind::distributor;
    else if (word == "sensor") out = ComponentKind::sensor;
    else return false;
    return true;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok)
        tokens.push_back(tok);
    return tokens;
}

double parse_number(const std::string& text, int line, int col) {
    if (text == "true")
        return 1.0;
    if (text == "false")
        return 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError(line, col, "expected a number, got '" + text + "'");
    return value;
}

std::vector<double> parse_value_list(const std::string& text, int line, int col) {
    std::vector<double> values;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        values.push_back(parse_number(item, line, col));
    if (values.empty())
        throw ParseError(line, col, "empty value list");
    return values;
}

/// Splits "id.port" and reports a position-aware error otherwise.
std::pair<std::string, std::string> parse_endpoint(const std::string& tok, int line, int col) {
    auto dot = tok.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == tok.size())
        throw ParseError(line, col, "expected component.port, got '" + tok + "'");
    return {tok.substr(0, dot), tok.substr(dot + 1)};
}

} // namespace

const char* kind_name(ComponentKind kind) {
    switch (kind) {
    case ComponentKind::ejector: return "ejector";
    case ComponentKind::hose: return "hose";
    case ComponentKind::reservoir: return "reservoir";
    case ComponentKind::suction_cup: return "suction_cup";
    case ComponentKind::distributor: return "distributor";
    case ComponentKind::sensor: return "sensor";
    }
    return "?";
}

const Component* SystemGraph::find_component(const std::string& id) const {
    for (const auto& c : components)
        if (c.id == id)
            return &c;
    return nullptr;
}

SystemGraph parse_graph(const std::string& document) {
    SystemGraph g;
    bool version_seen = false;
    enum class Section { none, solver, components, connections, io };
    Section section = Section::none;

    std::istringstream in(document);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        auto tokens = tokenize(line);
        if (tokens.empty())
            continue;

        if (tokens[0].front() == '[') {
            if (tokens.size() != 1 || tokens[0].back() != ']')
                throw ParseError(line_no, 1, "malformed section header");
            const std::string name = tokens[0].substr(1, tokens[0].size() - 2);
            if (name == "solver") section = Section::solver;
            else if (name == "components") section = Section::components;
            else if (name == "connections") section = Section::connections;
            else if (name == "io") section = Section::io;
            else throw ParseError(line_no, 1, "unknown section [" + name + "]");
            continue;
        }

        if (section == Section::none) {
            // preamble: key = value
            if (tokens.size() == 3 && tokens[0] == "format_version" && tokens[1] == "=") {
                g.format_version = static_cast<int>(parse_number(tokens[2], line_no, 1));
                version_seen = true;
                continue;
            }
            throw ParseError(line_no, 1, "expected 'format_version = <n>' or a section header");
        }

        if (section == Section::solver) {
            if (tokens.size() != 3 || tokens[1] != "=")
                throw ParseError(line_no, 1, "expected 'key = value' in [solver]");
            if (tokens[0] == "dt")
                g.solver.dt = parse_number(tokens[2], line_no, 1);
            else if (tokens[0] == "max_step")
                g.solver.max_step = parse_number(tokens[2], line_no, 1);
            else
                throw ParseError(line_no, 1, "unknown solver key '" + tokens[0] + "'");
            continue;
        }

        if (section == Section::components) {
            if (tokens.size() < 2)
                throw ParseError(line_no, 1, "expected '<id> <kind> [key=value ...]'");
            Component c;
            c.id = tokens[0];
            c.line = line_no;
            if (!parse_kind(tokens[1], c.kind))
                throw ParseError(line_no, 1, "unknown component kind '" + tokens[1] + "'");
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                auto eq = tokens[i].find('=');
                if (eq == std::string::npos)
                    throw ParseError(line_no, 1, "expected key=value, got '" + tokens[i] + "'");
                const std::string key = tokens[i].substr(0, eq);
                const std::string value = tokens[i].substr(eq + 1);
                bool known = false;
                for (const auto& spec : params_for(c.kind))
                    known = known || key == spec.name;
                if (!known)
                    throw ParseError(line_no, 1, "unknown parameter '" + key + "' for kind " +
                                                     std::string(kind_name(c.kind)));
                if (c.params.count(key))
                    throw ParseError(line_no, 1, "duplicate parameter '" + key + "'");
                c.params[key] = parse_number(value, line_no, 1);
            }
            for (const auto& spec : params_for(c.kind))
                if (spec.required && !c.params.count(spec.name))
                    throw ParseError(line_no, 1, "missing required parameter '" +
                                                     std::string(spec.name) + "' for " + c.id);
            g.components.push_back(std::move(c));
            continue;
        }

        if (section == Section::connections) {
            if (tokens.size() != 3 || tokens[1] != "--")
                throw ParseError(line_no, 1, "expected '<a.port> -- <b.port>'");
            Connection conn;
            conn.line = line_no;
            std::tie(conn.a_id, conn.a_port) = parse_endpoint(tokens[0], line_no, 1);
            std::tie(conn.b_id, conn.b_port) = parse_endpoint(tokens[2], line_no, 1);
            g.connections.push_back(std::move(conn));
            continue;
        }

        // [io]
        if (tokens.size() < 4)
            throw ParseError(line_no, 1, "expected 'input <name> -> <c.port>' or 'output <name> <- <c.port>'");
        IoBinding b;
        b.line = line_no;
        b.name = tokens[1];
        if (tokens[0] == "input" && tokens[2] == "->")
            b.direction = IoDirection::input;
        else if (tokens[0] == "output" && tokens[2] == "<-")
            b.direction = IoDirection::output;
        else
            throw ParseError(line_no, 1, "expected 'input <name> -> ...' or 'output <name> <- ...'");
        std::tie(b.component, b.port) = parse_endpoint(tokens[3], line_no, 1);
        for (std::size_t i = 4; i < tokens.size(); ++i) {
            auto eq = tokens[i].find('=');
            if (eq == std::string::npos || tokens[i].substr(0, eq) != "values")
                throw ParseError(line_no, 1, "unexpected token '" + tokens[i] + "'");
            if (b.direction != IoDirection::input)
                throw ParseError(line_no, 1, "values= is only valid on inputs");
            b.values = parse_value_list(tokens[i].substr(eq + 1), line_no, 1);
        }
        g.io.push_back(std::move(b));
    }

    if (!version_seen)
        throw ParseError(1, 1, "missing format_version");
    if (g.format_version != 1)
        throw ParseError(1, 1, "unsupported format_version " + std::to_string(g.format_version));
    return g;
}

SystemGraph parse_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open graph document '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

} // namespace vgs::graph
