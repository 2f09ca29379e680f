#include "vgs.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "vgs/bench.hpp"
#include "vgs/explorer.hpp"
#include "vgs/graph.hpp"
#include "vgs/machine.hpp"
#include "vgs/model_io.hpp"

using nlohmann::json;

extern "C" {

struct vgs_graph {
    vgs::graph::SystemGraph value;
};
struct vgs_model {
    std::unique_ptr<vgs::DetailedModel> value;
};
struct vgs_discovery {
    vgs::explore::DiscoveryResult value;
};
struct vgs_machine {
    vgs::machine::AbstractMachine value;
};
struct vgs_trace {
    vgs::Trace value;
};

} // extern "C"

namespace {

thread_local std::string last_error;

int fail(const vgs::Error& e) {
    last_error = e.what();
    return e.code();
}

int fail_unexpected(const std::exception& e) {
    last_error = e.what();
    return VGS_ERR_MODEL;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        last_error.clear();
        return VGS_OK;
    } catch (const vgs::Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        return fail_unexpected(e);
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

template <typename Fn>
char* guarded_string(Fn&& fn) {
    try {
        std::string s = fn();
        last_error.clear();
        return dup_string(s);
    } catch (const vgs::Error& e) {
        fail(e);
        return nullptr;
    } catch (const std::exception& e) {
        fail_unexpected(e);
        return nullptr;
    }
}

std::vector<vgs::bench::PhaseSpec> phases_from_json(const char* phases_json) {
    std::vector<vgs::bench::PhaseSpec> phases;
    if (!phases_json || !*phases_json)
        return phases;
    json doc = json::parse(phases_json, nullptr, false);
    if (doc.is_discarded() || !doc.is_array())
        throw vgs::ConfigError("phases must be a JSON array");
    for (const auto& e : doc) {
        vgs::bench::PhaseSpec p;
        p.name = e.at("name").get<std::string>();
        p.from_s = e.at("from_s").get<double>();
        p.to_s = e.at("to_s").get<double>();
        phases.push_back(std::move(p));
    }
    return phases;
}

std::vector<std::pair<std::string, std::string>> machines_from_arrays(
    const char* const* labels, const char* const* docs, int count) {
    std::vector<std::pair<std::string, std::string>> out;
    for (int i = 0; i < count; ++i)
        out.emplace_back(labels[i], docs[i]);
    return out;
}

} // namespace

extern "C" {

const char* vgs_version(void) { return "0.1.0"; }

const char* vgs_last_error(void) { return last_error.c_str(); }

void vgs_string_free(char* s) { delete[] s; }

int vgs_graph_parse(const char* text, vgs_graph** out) {
    return guarded([&] { *out = new vgs_graph{vgs::graph::parse_graph(text)}; });
}

int vgs_graph_parse_file(const char* path, vgs_graph** out) {
    return guarded([&] { *out = new vgs_graph{vgs::graph::parse_graph_file(path)}; });
}

char* vgs_graph_validate(const vgs_graph* g) {
    return guarded_string([&] {
        json arr = json::array();
        for (const auto& v : vgs::graph::validate_graph(g->value)) {
            json e;
            e["code"] = v.code;
            e["message"] = v.message;
            arr.push_back(std::move(e));
        }
        return arr.dump(2) + "\n";
    });
}

int vgs_graph_assemble(const vgs_graph* g, vgs_model** out) {
    return guarded([&] { *out = new vgs_model{vgs::graph::assemble(g->value)}; });
}

void vgs_graph_free(vgs_graph* g) { delete g; }

char* vgs_model_describe(const vgs_model* m) {
    return guarded_string([&] { return vgs::io::describe_model_json(*m->value); });
}

char* vgs_model_bundle(const vgs_model* m, const vgs_graph* g, const char* graph_text) {
    return guarded_string(
        [&] { return vgs::io::model_bundle_json(*m->value, g->value, graph_text); });
}

int vgs_model_run(vgs_model* m, const char* script_json, double dt_s, vgs_trace** out) {
    return guarded([&] {
        const auto script = vgs::io::script_from_json(script_json);
        *out = new vgs_trace{vgs::run_model(*m->value, script, dt_s)};
        (*out)->value.source = "mdt4";
    });
}

void vgs_model_free(vgs_model* m) { delete m; }

int vgs_explore(vgs_model* m, const char* config_json, vgs_discovery** out) {
    return guarded([&] {
        const auto cfg = vgs::io::exploration_config_from_json(config_json);
        *out = new vgs_discovery{vgs::explore::explore(*m->value, cfg)};
    });
}

char* vgs_discovery_save(const vgs_discovery* d, const char* note) {
    return guarded_string([&] { return vgs::io::save_discovery(d->value, note ? note : ""); });
}

int vgs_discovery_load(const char* document, vgs_discovery** out) {
    return guarded([&] { *out = new vgs_discovery{vgs::io::load_discovery(document)}; });
}

char* vgs_discovery_dot(const vgs_discovery* d) {
    return guarded_string([&] { return vgs::io::export_dot(d->value); });
}

void vgs_discovery_free(vgs_discovery* d) { delete d; }

int vgs_synthesize(const vgs_discovery* d, int level, vgs_machine** out) {
    return guarded([&] {
        *out = new vgs_machine{
            vgs::machine::synthesize(d->value, vgs::machine::level_from_int(level))};
    });
}

char* vgs_machine_save(const vgs_machine* m, const char* note) {
    return guarded_string([&] { return vgs::io::save_machine(m->value, note ? note : ""); });
}

int vgs_machine_load(const char* document, vgs_machine** out) {
    return guarded([&] { *out = new vgs_machine{vgs::io::load_machine(document)}; });
}

char* vgs_machine_dot(const vgs_machine* m) {
    return guarded_string([&] { return vgs::io::export_dot(m->value); });
}

int vgs_machine_level(const vgs_machine* m) { return static_cast<int>(m->value.level); }

int vgs_machine_run(const vgs_machine* m, const char* script_json, double dt_s,
                    int unknown_input_policy, vgs_trace** out) {
    return guarded([&] {
        const auto script = vgs::io::script_from_json(script_json);
        const auto policy = unknown_input_policy == VGS_UNKNOWN_INPUT_REJECT
                                ? vgs::machine::UnknownInputPolicy::reject
                                : vgs::machine::UnknownInputPolicy::hold_and_warn;
        *out = new vgs_trace{vgs::machine::run_machine(m->value, script, dt_s, policy)};
    });
}

void vgs_machine_free(vgs_machine* m) { delete m; }

char* vgs_trace_csv(const vgs_trace* t) {
    return guarded_string([&] { return vgs::io::write_trace_csv(t->value); });
}

int vgs_trace_from_csv(const char* text, vgs_trace** out) {
    return guarded([&] { *out = new vgs_trace{vgs::io::read_trace_csv(text)}; });
}

void vgs_trace_free(vgs_trace* t) { delete t; }

char* vgs_compare(const vgs_trace* a, const vgs_trace* b, const char* phases_json) {
    return guarded_string([&] {
        const auto report = vgs::bench::compare_traces(a->value, b->value,
                                                       phases_from_json(phases_json));
        return vgs::bench::deviation_report_json(report);
    });
}

char* vgs_compare_text(const vgs_trace* a, const vgs_trace* b, const char* phases_json) {
    return guarded_string([&] {
        const auto report = vgs::bench::compare_traces(a->value, b->value,
                                                       phases_from_json(phases_json));
        return vgs::bench::deviation_report_text(report);
    });
}

char* vgs_bench(const char* graph_text, const char* const* machine_labels,
                const char* const* machine_docs, int machine_count, const char* script_json,
                double dt_s, int repetitions, int parallel) {
    return guarded_string([&] {
        vgs::bench::BenchOptions options;
        options.repetitions = repetitions;
        options.parallel = parallel != 0;
        const auto report = vgs::bench::run_benchmark(
            graph_text, machines_from_arrays(machine_labels, machine_docs, machine_count),
            vgs::io::script_from_json(script_json), dt_s, options);
        return vgs::bench::timing_report_json(report);
    });
}

} // extern "C"
