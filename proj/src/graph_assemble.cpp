#include "vgs/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "vgs/hash.hpp"

namespace vgs::graph {

namespace {

double param_or(const Component& c, const std::string& key, double fallback) {
    auto it = c.params.find(key);
    return it == c.params.end() ? fallback : it->second;
}

bool is_pneumatic_port(ComponentKind kind, const std::string& port) {
    switch (kind) {
    case ComponentKind::ejector: return port == "port";
    case ComponentKind::hose: return port == "a" || port == "b";
    case ComponentKind::reservoir:
    case ComponentKind::suction_cup:
    case ComponentKind::distributor:
    case ComponentKind::sensor: return port == "p";
    }
    return false;
}

bool is_signal_sink(ComponentKind kind, const std::string& port) {
    return kind == ComponentKind::ejector && (port == "suction" || port == "blow");
}

bool is_measurement_source(ComponentKind kind, const std::string& port) {
    if (kind != ComponentKind::ejector && kind != ComponentKind::sensor)
        return false;
    return port == "vacuum" || port == "h2" || port == "pdi_byte";
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

pneumo::ThresholdConfig thresholds_from(const Component& c) {
    pneumo::ThresholdConfig t;
    t.h2 = param_or(c, "h2", t.h2);
    t.h3 = param_or(c, "h3", t.h3);
    t.h4 = param_or(c, "h4", t.h4);
    t.h5 = param_or(c, "h5", t.h5);
    return t;
}

} // namespace

std::vector<Violation> validate_graph(const SystemGraph& g) {
    std::vector<Violation> out;

    std::set<std::string> seen;
    for (const auto& c : g.components) {
        if (!seen.insert(c.id).second)
            out.push_back({"DUPLICATE_ID", "component id '" + c.id + "' declared more than once"});
    }

    auto check_endpoint = [&](const std::string& id, const std::string& port, int line) {
        const Component* c = g.find_component(id);
        if (!c) {
            out.push_back({"UNDEFINED_COMPONENT",
                           "line " + std::to_string(line) + ": unknown component '" + id + "'"});
            return;
        }
        if (!is_pneumatic_port(c->kind, port))
            out.push_back({"UNKNOWN_PORT", "line " + std::to_string(line) + ": '" + id + "." +
                                               port + "' is not a pneumatic port"});
    };
    for (const auto& conn : g.connections) {
        check_endpoint(conn.a_id, conn.a_port, conn.line);
        check_endpoint(conn.b_id, conn.b_port, conn.line);
    }

    std::set<std::string> io_names;
    for (const auto& b : g.io) {
        if (!io_names.insert(b.name).second)
            out.push_back({"DUPLICATE_IO_NAME", "io name '" + b.name + "' bound more than once"});
        const Component* c = g.find_component(b.component);
        if (!c) {
            out.push_back({"UNDEFINED_COMPONENT", "line " + std::to_string(b.line) +
                                                      ": unknown component '" + b.component + "'"});
            continue;
        }
        if (b.direction == IoDirection::input && !is_signal_sink(c->kind, b.port))
            out.push_back({"UNKNOWN_PORT", "input '" + b.name + "' targets '" + b.component + "." +
                                               b.port + "', which is not a signal input port"});
        if (b.direction == IoDirection::output && !is_measurement_source(c->kind, b.port))
            out.push_back({"UNKNOWN_PORT", "output '" + b.name + "' reads '" + b.component + "." +
                                               b.port + "', which is not a measurement port"});
    }

    // Pneumatic connectivity over components.
    if (!g.components.empty()) {
        UnionFind uf(static_cast<int>(g.components.size()));
        auto index_of = [&](const std::string& id) {
            for (std::size_t i = 0; i < g.components.size(); ++i)
                if (g.components[i].id == id)
                    return static_cast<int>(i);
            return -1;
        };
        for (const auto& conn : g.connections) {
            int a = index_of(conn.a_id);
            int b = index_of(conn.b_id);
            if (a >= 0 && b >= 0)
                uf.unite(a, b);
        }
        const int root = uf.find(0);
        for (std::size_t i = 1; i < g.components.size(); ++i)
            if (uf.find(static_cast<int>(i)) != root)
                out.push_back({"DISCONNECTED_NODE", "component '" + g.components[i].id +
                                                        "' is not connected to the pneumatic network"});
    }

    int generators = 0;
    for (const auto& c : g.components)
        if (c.kind == ComponentKind::ejector)
            ++generators;
    if (generators == 0)
        out.push_back({"NO_GENERATOR", "the network has no vacuum generator"});
    else if (generators > 1)
        out.push_back({"MULTIPLE_GENERATORS",
                       "expected exactly one vacuum generator, found " + std::to_string(generators)});

    return out;
}

std::map<std::string, double> resolved_params(const Component& c) {
    std::map<std::string, double> out = c.params;
    auto put = [&](const char* key, double fallback) {
        if (!out.count(key))
            out[key] = fallback;
    };
    switch (c.kind) {
    case ComponentKind::ejector:
        put("blow_flow", 0.0);
        put("blow_overpressure", -12.0);
        put("check_valve", 1.0);
        put("plenum_volume", 1e-5);
        put("h2", 550.0);
        put("h3", 500.0);
        put("h4", 600.0);
        put("h5", 750.0);
        put("resolution", 1.0);
        break;
    case ComponentKind::hose:
        put("segments", 8.0);
        put("viscosity", 1.8e-5);
        break;
    case ComponentKind::suction_cup:
        put("leak", 0.0);
        break;
    case ComponentKind::distributor:
        put("volume", 5e-6);
        break;
    case ComponentKind::sensor:
        put("resolution", 1.0);
        put("h2", 550.0);
        put("h3", 500.0);
        put("h4", 600.0);
        put("h5", 750.0);
        break;
    case ComponentKind::reservoir:
        break;
    }
    return out;
}

std::unique_ptr<DetailedModel> assemble(const SystemGraph& g) {
    auto violations = validate_graph(g);
    if (!violations.empty()) {
        std::string msg = "graph is not valid:";
        for (const auto& v : violations)
            msg += "\n  [" + v.code + "] " + v.message;
        throw ModelError(msg);
    }
    if (!(g.solver.dt > 0.0) || g.solver.dt > g.solver.max_step)
        throw ModelError("solver dt must be in (0, max_step]");

    // Every pneumatic port is an attachment point; connections merge points
    // into junction groups, and each group with volume becomes one ODE node.
    struct Point {
        std::string label;
        double volume = 0.0;
        bool sealed_ok = false; // dangling hose end is a sealed cap, not an error
    };
    std::vector<Point> points;
    std::map<std::pair<std::string, std::string>, int> point_index;

    auto add_point = [&](const std::string& id, const std::string& port, Point p) {
        point_index[{id, port}] = static_cast<int>(points.size());
        points.push_back(std::move(p));
    };

    struct HosePlan {
        const Component* comp = nullptr;
        pneumo::HoseParams params;
    };
    std::vector<HosePlan> hoses;
    const Component* ejector_comp = nullptr;
    pneumo::EjectorParams ejector_params;

    for (const auto& c : g.components) {
        switch (c.kind) {
        case ComponentKind::ejector: {
            ejector_comp = &c;
            ejector_params.s_max = param_or(c, "s_max", 0.0);
            ejector_params.pv_max = param_or(c, "pv_max", 0.0);
            ejector_params.blow_flow = param_or(c, "blow_flow", 0.0);
            ejector_params.blow_overpressure = param_or(c, "blow_overpressure", -12.0);
            ejector_params.has_check_valve = param_or(c, "check_valve", 1.0) != 0.0;
            ejector_params.validate();
            const double plenum = param_or(c, "plenum_volume", 1e-5);
            if (!(plenum > 0.0))
                throw ModelError("ejector '" + c.id + "': plenum_volume must be > 0");
            add_point(c.id, "port", {c.id, plenum, false});
            break;
        }
        case ComponentKind::hose: {
            HosePlan plan;
            plan.comp = &c;
            plan.params.length = param_or(c, "length", 0.0);
            plan.params.inner_diameter = param_or(c, "inner_diameter", 0.0);
            plan.params.segments = static_cast<int>(param_or(c, "segments", 8));
            plan.params.viscosity = param_or(c, "viscosity", 1.8e-5);
            plan.params.validate();
            const double seg_volume = plan.params.volume() / plan.params.segments;
            add_point(c.id, "a", {c.id + ".a", 0.0, true});
            add_point(c.id, "b",
                      {c.id + ".seg" + std::to_string(plan.params.segments), seg_volume, false});
            hoses.push_back(plan);
            break;
        }
        case ComponentKind::reservoir:
        case ComponentKind::suction_cup: {
            const double volume = param_or(c, "volume", 0.0);
            if (!(volume > 0.0))
                throw ModelError(std::string(kind_name(c.kind)) + " '" + c.id +
                                 "': volume must be > 0");
            if (c.kind == ComponentKind::suction_cup && param_or(c, "leak", 0.0) < 0.0)
                throw ModelError("suction_cup '" + c.id + "': leak must be >= 0");
            add_point(c.id, "p", {c.id, volume, false});
            break;
        }
        case ComponentKind::distributor: {
            const double volume = param_or(c, "volume", 5e-6);
            if (!(volume > 0.0))
                throw ModelError("distributor '" + c.id + "': volume must be > 0");
            add_point(c.id, "p", {c.id, volume, false});
            break;
        }
        case ComponentKind::sensor: {
            thresholds_from(c).validate();
            if (!(param_or(c, "resolution", 1.0) > 0.0))
                throw ModelError("sensor '" + c.id + "': resolution must be > 0");
            add_point(c.id, "p", {c.id + ".p", 0.0, false});
            break;
        }
        }
    }
    if (ejector_comp) {
        thresholds_from(*ejector_comp).validate();
        if (!(param_or(*ejector_comp, "resolution", 1.0) > 0.0))
            throw ModelError("ejector '" + ejector_comp->id + "': resolution must be > 0");
    }

    UnionFind uf(static_cast<int>(points.size()));
    for (const auto& conn : g.connections)
        uf.unite(point_index.at({conn.a_id, conn.a_port}), point_index.at({conn.b_id, conn.b_port}));

    // Group -> node. Groups without any volume are either sealed hose caps
    // (single dangling 'a' end) or an assembly error.
    pneumo::PneumaticNetwork net;
    net.max_step_s = g.solver.max_step;
    std::map<int, int> group_node; // uf root -> node index, -1 = sealed
    std::map<int, std::vector<int>> group_members;
    for (std::size_t i = 0; i < points.size(); ++i)
        group_members[uf.find(static_cast<int>(i))].push_back(static_cast<int>(i));

    for (auto& [root, members] : group_members) {
        double volume = 0.0;
        std::string label;
        for (int m : members) {
            if (points[m].volume <= 0.0)
                continue;
            volume += points[m].volume;
            if (!label.empty())
                label += "+";
            label += points[m].label;
        }
        if (volume > 0.0) {
            group_node[root] = static_cast<int>(net.nodes.size());
            net.nodes.push_back({label, volume});
        } else if (members.size() == 1 && points[members[0]].sealed_ok) {
            group_node[root] = -1;
        } else {
            std::string junction;
            for (int m : members)
                junction += (junction.empty() ? "" : ", ") + points[m].label;
            throw ModelError("pneumatic junction without volume: " + junction);
        }
    }

    auto node_of = [&](const std::string& id, const std::string& port) {
        return group_node.at(uf.find(point_index.at({id, port})));
    };

    // Hose internals: N equal volume segments, each behind an equal share of
    // the total flow resistance.
    for (const auto& plan : hoses) {
        const auto& c = *plan.comp;
        const int n = plan.params.segments;
        const double seg_volume = plan.params.volume() / n;
        const double seg_resistance =
            pneumo::hose_resistance(plan.params.inner_diameter, plan.params.length,
                                    plan.params.viscosity) /
            n;
        const int b_node = node_of(c.id, "b");
        int upstream = node_of(c.id, "a"); // may be -1 (sealed cap)
        for (int s = 1; s < n; ++s) {
            const int node = static_cast<int>(net.nodes.size());
            net.nodes.push_back({c.id + ".seg" + std::to_string(s), seg_volume});
            net.resistors.push_back({upstream, node, seg_resistance});
            upstream = node;
        }
        net.resistors.push_back({upstream, b_node, seg_resistance});
    }

    net.ejectors.push_back({node_of(ejector_comp->id, "port"), ejector_params});

    for (const auto& c : g.components) {
        if (c.kind != ComponentKind::suction_cup)
            continue;
        const double leak = param_or(c, "leak", 0.0);
        if (leak > 0.0)
            net.leaks.push_back({node_of(c.id, "p"), leak});
    }

    // External I/O in document order.
    IoSignature inputs;
    std::vector<OutputBinding> outputs;
    int suction_index = -1;
    int blow_index = -1;
    for (const auto& b : g.io) {
        const Component& c = *g.find_component(b.component);
        if (b.direction == IoDirection::input) {
            const int idx = static_cast<int>(inputs.size());
            if (b.port == "suction") {
                if (suction_index >= 0)
                    throw ModelError("input port '" + b.component + ".suction' bound twice");
                suction_index = idx;
            } else {
                if (blow_index >= 0)
                    throw ModelError("input port '" + b.component + ".blow' bound twice");
                blow_index = idx;
            }
            SignalSpec spec;
            spec.name = b.name;
            spec.kind = SignalKind::discrete;
            spec.values = b.values.empty() ? std::vector<double>{0.0, 24.0} : b.values;
            inputs.push_back(std::move(spec));
        } else {
            OutputBinding ob;
            ob.name = b.name;
            ob.role = b.port == "vacuum"  ? OutputRole::vacuum
                      : b.port == "h2"    ? OutputRole::h2
                                          : OutputRole::pdi_byte;
            const std::string pneumatic_port = c.kind == ComponentKind::ejector ? "port" : "p";
            ob.node = node_of(b.component, pneumatic_port);
            if (ob.node < 0)
                throw ModelError("output '" + b.name + "' measures a sealed junction");
            ob.thresholds = thresholds_from(c);
            ob.resolution = param_or(c, "resolution", 1.0);
            outputs.push_back(std::move(ob));
        }
    }

    // Canonical structural description, hashed into the model identity.
    std::ostringstream desc;
    desc << "solver_dt=" << fmt_double(g.solver.dt) << ";max_step=" << fmt_double(g.solver.max_step);
    for (const auto& n : net.nodes)
        desc << ";node " << n.name << " " << fmt_double(n.volume_m3);
    for (const auto& r : net.resistors)
        desc << ";res " << r.node_a << " " << r.node_b << " " << fmt_double(r.resistance);
    for (const auto& e : net.ejectors)
        desc << ";ej " << e.node << " " << fmt_double(e.params.s_max) << " "
             << fmt_double(e.params.pv_max) << " " << fmt_double(e.params.blow_flow) << " "
             << fmt_double(e.params.blow_overpressure) << " " << e.params.has_check_valve;
    for (const auto& l : net.leaks)
        desc << ";leak " << l.node << " " << fmt_double(l.coefficient);
    for (const auto& s : inputs) {
        desc << ";in " << s.name;
        for (double v : s.values)
            desc << "," << fmt_double(v);
    }
    for (const auto& o : outputs)
        desc << ";out " << o.name << " " << static_cast<int>(o.role) << " " << o.node << " "
             << fmt_double(o.resolution) << " " << fmt_double(o.thresholds.h2) << " "
             << fmt_double(o.thresholds.h3) << " " << fmt_double(o.thresholds.h4) << " "
             << fmt_double(o.thresholds.h5);

    return std::make_unique<DetailedModel>(std::move(net), std::move(inputs), suction_index,
                                           blow_index, std::move(outputs), g.solver.dt,
                                           fnv1a_hex(desc.str()));
}

} // namespace vgs::graph
