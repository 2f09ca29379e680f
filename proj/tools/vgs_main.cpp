// Command-line front end. All model functionality goes through the C API of
// libvgs (include/vgs.h); this translation unit only handles configuration,
// file I/O and argument parsing.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vgs.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
    throw CliError{code, message};
}

[[noreturn]] void fail_api(int code) {
    throw CliError{code ? code : VGS_ERR_MODEL, vgs_last_error()};
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        fail(VGS_ERR_IO, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        fail(VGS_ERR_IO, "cannot write '" + path.string() + "'");
    out << content;
}

/// Owned string returned by the C API.
struct ApiString {
    char* value = nullptr;
    ~ApiString() { vgs_string_free(value); }
    std::string str() const { return value ? value : ""; }
};

struct RunConfig {
    fs::path graph_path;
    fs::path out_dir = "out";
    std::string exploration_json = "{}";
    std::vector<int> levels = {1, 2, 3};
    std::string script_json;
    double script_dt = 1e-3;
    int repetitions = 30;
    bool parallel = false;
    std::string phases_json = "[]";
};

RunConfig load_config(const std::string& path, bool graph_required) {
    RunConfig cfg;
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        fail(VGS_ERR_CONFIG, "config '" + path + "': " + e.what());
    }
    if (doc.contains("graph"))
        cfg.graph_path = doc["graph"].get<std::string>();
    if (doc.contains("out_dir"))
        cfg.out_dir = doc["out_dir"].get<std::string>();
    if (doc.contains("exploration"))
        cfg.exploration_json = doc["exploration"].dump();
    if (doc.contains("synthesis") && doc["synthesis"].contains("levels"))
        cfg.levels = doc["synthesis"]["levels"].get<std::vector<int>>();
    if (doc.contains("script")) {
        json script = doc["script"];
        if (script.contains("dt_s")) {
            cfg.script_dt = script["dt_s"].get<double>();
            script.erase("dt_s");
        }
        cfg.script_json = script.dump();
    }
    if (doc.contains("benchmark")) {
        const json& b = doc["benchmark"];
        if (b.contains("repetitions"))
            cfg.repetitions = b["repetitions"].get<int>();
        if (b.contains("parallel"))
            cfg.parallel = b["parallel"].get<bool>();
        if (b.contains("phases"))
            cfg.phases_json = b["phases"].dump();
    }
    for (int level : cfg.levels)
        if (level < 1 || level > 3)
            fail(VGS_ERR_CONFIG, "config: synthesis levels must be within 1..3");
    if (graph_required) {
        if (cfg.graph_path.empty())
            fail(VGS_ERR_CONFIG, "config: missing 'graph' path");
        if (!fs::exists(cfg.graph_path))
            fail(VGS_ERR_CONFIG, "config: graph document '" + cfg.graph_path.string() +
                                     "' does not exist");
    }
    return cfg;
}

struct GraphHandle {
    vgs_graph* value = nullptr;
    ~GraphHandle() { vgs_graph_free(value); }
};
struct ModelHandle {
    vgs_model* value = nullptr;
    ~ModelHandle() { vgs_model_free(value); }
};
struct DiscoveryHandle {
    vgs_discovery* value = nullptr;
    ~DiscoveryHandle() { vgs_discovery_free(value); }
};
struct MachineHandle {
    vgs_machine* value = nullptr;
    ~MachineHandle() { vgs_machine_free(value); }
};
struct TraceHandle {
    vgs_trace* value = nullptr;
    ~TraceHandle() { vgs_trace_free(value); }
};

void parse_and_assemble(const RunConfig& cfg, GraphHandle& graph, ModelHandle& model) {
    if (int rc = vgs_graph_parse_file(cfg.graph_path.string().c_str(), &graph.value))
        fail_api(rc);
    if (int rc = vgs_graph_assemble(graph.value, &model.value))
        fail_api(rc);
}

std::string note_comment(const std::string& note) {
    return note.empty() ? "" : "# note: " + note + "\n";
}

int cmd_build(const RunConfig& cfg, const std::string& note) {
    GraphHandle graph;
    if (int rc = vgs_graph_parse_file(cfg.graph_path.string().c_str(), &graph.value))
        fail_api(rc);
    ApiString violations{vgs_graph_validate(graph.value)};
    if (!violations.value)
        fail_api(VGS_ERR_MODEL);
    const json parsed = json::parse(violations.str());
    if (!parsed.empty()) {
        std::cerr << "graph is not valid:\n" << violations.str();
        fail(VGS_ERR_MODEL, "graph validation reported " + std::to_string(parsed.size()) +
                                " violation(s)");
    }
    ModelHandle model;
    if (int rc = vgs_graph_assemble(graph.value, &model.value))
        fail_api(rc);
    ApiString report{vgs_model_describe(model.value)};
    if (!report.value)
        fail_api(VGS_ERR_MODEL);
    fs::create_directories(cfg.out_dir);
    json doc = json::parse(report.str());
    if (!note.empty())
        doc["note"] = note;
    write_file(cfg.out_dir / "build_report.json", doc.dump(2) + "\n");
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_explore(const RunConfig& cfg, const std::string& note) {
    GraphHandle graph;
    ModelHandle model;
    parse_and_assemble(cfg, graph, model);
    DiscoveryHandle discovery;
    if (int rc = vgs_explore(model.value, cfg.exploration_json.c_str(), &discovery.value))
        fail_api(rc);
    ApiString doc{vgs_discovery_save(discovery.value, note.c_str())};
    if (!doc.value)
        fail_api(VGS_ERR_IO);
    fs::create_directories(cfg.out_dir);
    write_file(cfg.out_dir / "discovery.json", doc.str());
    std::cout << "discovery written to " << (cfg.out_dir / "discovery.json").string() << "\n";
    return 0;
}

int cmd_synthesize(const RunConfig& cfg, const std::string& note) {
    const fs::path discovery_path = cfg.out_dir / "discovery.json";
    if (!fs::exists(discovery_path))
        fail(VGS_ERR_CONFIG, "no discovery at '" + discovery_path.string() + "'; run explore first");
    DiscoveryHandle discovery;
    if (int rc = vgs_discovery_load(read_file(discovery_path).c_str(), &discovery.value))
        fail_api(rc);
    ApiString ddot{vgs_discovery_dot(discovery.value)};
    if (!ddot.value)
        fail_api(VGS_ERR_IO);
    write_file(cfg.out_dir / "discovery.dot", ddot.str());
    for (int level : cfg.levels) {
        MachineHandle machine;
        if (int rc = vgs_synthesize(discovery.value, level, &machine.value))
            fail_api(rc);
        ApiString doc{vgs_machine_save(machine.value, note.c_str())};
        ApiString dot{vgs_machine_dot(machine.value)};
        if (!doc.value || !dot.value)
            fail_api(VGS_ERR_IO);
        const std::string stem = "machine_mdt" + std::to_string(level);
        write_file(cfg.out_dir / (stem + ".json"), doc.str());
        write_file(cfg.out_dir / (stem + ".dot"), dot.str());
        std::cout << "level " << level << " -> " << (cfg.out_dir / (stem + ".json")).string()
                  << "\n";
    }
    return 0;
}

int cmd_run(const RunConfig& cfg, const std::string& note, int level, bool mdt4,
            const std::string& machine_path, bool strict_inputs) {
    if (cfg.script_json.empty())
        fail(VGS_ERR_CONFIG, "config: missing 'script' section");
    fs::create_directories(cfg.out_dir);

    TraceHandle trace;
    std::string label;
    if (mdt4) {
        GraphHandle graph;
        ModelHandle model;
        parse_and_assemble(cfg, graph, model);
        if (int rc = vgs_model_run(model.value, cfg.script_json.c_str(), cfg.script_dt,
                                   &trace.value))
            fail_api(rc);
        label = "mdt4";
    } else {
        fs::path path = machine_path;
        if (path.empty()) {
            if (level < 1)
                fail(VGS_ERR_CONFIG, "run: give --level, --mdt4 or --machine");
            path = cfg.out_dir / ("machine_mdt" + std::to_string(level) + ".json");
        }
        if (!fs::exists(path))
            fail(VGS_ERR_CONFIG, "no machine at '" + path.string() + "'; run synthesize first");
        MachineHandle machine;
        if (int rc = vgs_machine_load(read_file(path).c_str(), &machine.value))
            fail_api(rc);
        const int policy = strict_inputs ? VGS_UNKNOWN_INPUT_REJECT : VGS_UNKNOWN_INPUT_HOLD;
        if (int rc = vgs_machine_run(machine.value, cfg.script_json.c_str(), cfg.script_dt, policy,
                                     &trace.value))
            fail_api(rc);
        label = "mdt" + std::to_string(vgs_machine_level(machine.value));
    }
    ApiString csv{vgs_trace_csv(trace.value)};
    if (!csv.value)
        fail_api(VGS_ERR_IO);
    const fs::path out = cfg.out_dir / ("trace_" + label + ".csv");
    write_file(out, note_comment(note) + csv.str());
    std::cout << "trace written to " << out.string() << "\n";
    return 0;
}

int cmd_compare(const RunConfig& cfg, const std::string& a_path, const std::string& b_path) {
    TraceHandle a, b;
    if (int rc = vgs_trace_from_csv(read_file(a_path).c_str(), &a.value))
        fail_api(rc);
    if (int rc = vgs_trace_from_csv(read_file(b_path).c_str(), &b.value))
        fail_api(rc);
    ApiString report_json{vgs_compare(a.value, b.value, cfg.phases_json.c_str())};
    if (!report_json.value)
        fail_api(VGS_ERR_CONFIG);
    ApiString report_text{vgs_compare_text(a.value, b.value, cfg.phases_json.c_str())};
    if (!report_text.value)
        fail_api(VGS_ERR_CONFIG);
    fs::create_directories(cfg.out_dir);
    write_file(cfg.out_dir / "compare_report.json", report_json.str());
    write_file(cfg.out_dir / "compare_report.txt", report_text.str());
    std::cout << report_text.str();
    return 0;
}

int cmd_bench(const RunConfig& cfg) {
    if (cfg.script_json.empty())
        fail(VGS_ERR_CONFIG, "config: missing 'script' section");
    std::vector<std::string> labels, docs;
    for (int level : cfg.levels) {
        const fs::path path = cfg.out_dir / ("machine_mdt" + std::to_string(level) + ".json");
        if (!fs::exists(path))
            fail(VGS_ERR_CONFIG, "no machine at '" + path.string() + "'; run synthesize first");
        labels.push_back("mdt" + std::to_string(level));
        docs.push_back(read_file(path));
    }
    std::vector<const char*> label_ptrs, doc_ptrs;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        label_ptrs.push_back(labels[i].c_str());
        doc_ptrs.push_back(docs[i].c_str());
    }
    const std::string graph_text = read_file(cfg.graph_path);
    ApiString report_json{vgs_bench(graph_text.c_str(), label_ptrs.data(), doc_ptrs.data(),
                                    static_cast<int>(labels.size()), cfg.script_json.c_str(),
                                    cfg.script_dt, cfg.repetitions, cfg.parallel ? 1 : 0)};
    if (!report_json.value)
        fail_api(VGS_ERR_MODEL);

    // Render the aligned table from the same measurement run.
    const json report = json::parse(report_json.str());
    std::ostringstream text;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d repetitions, %.6g s script at dt=%.6g s\n",
                  report["repetitions"].get<int>(), report["script_duration_s"].get<double>(),
                  report["dt_s"].get<double>());
    text << buf;
    std::snprintf(buf, sizeof buf, "%-8s %12s %34s %34s %8s\n", "level", "bytes",
                  "exec ms (min/mean/max)", "total ms (min/mean/max)", "constr");
    text << buf;
    for (const auto& l : report["levels"]) {
        std::snprintf(buf, sizeof buf,
                      "%-8s %12zu %10.3f/%10.3f/%10.3f %10.3f/%10.3f/%10.3f %7.1f%%\n",
                      l["label"].get<std::string>().c_str(),
                      l["artifact_bytes"].get<std::size_t>(), l["exec_ms"]["min"].get<double>(),
                      l["exec_ms"]["mean"].get<double>(), l["exec_ms"]["max"].get<double>(),
                      l["total_ms"]["min"].get<double>(), l["total_ms"]["mean"].get<double>(),
                      l["total_ms"]["max"].get<double>(),
                      100.0 * l["construction_share"].get<double>());
        text << buf;
    }
    fs::create_directories(cfg.out_dir);
    write_file(cfg.out_dir / "bench_report.json", report_json.str());
    write_file(cfg.out_dir / "bench_report.txt", text.str());
    std::cout << text.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vgs — behavior models of vacuum-gripping systems at modeling depths 1-4"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string seed_note;
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--out", out_override, "override the output directory");
    app.add_option("--seed-note", seed_note, "provenance note stamped into artifacts");

    auto* build = app.add_subcommand("build", "assemble the graph and report the model");
    auto* explore = app.add_subcommand("explore", "discover states and transitions");
    auto* synthesize = app.add_subcommand("synthesize", "create depth-1/2/3 machines");
    std::vector<int> level_args;
    synthesize->add_option("--level", level_args, "levels to synthesize (default from config)");

    auto* run = app.add_subcommand("run", "execute a model or machine through the script");
    int run_level = -1;
    bool run_mdt4 = false;
    bool strict_inputs = false;
    std::string machine_path;
    run->add_option("--level", run_level, "machine level to run");
    run->add_flag("--mdt4", run_mdt4, "run the detailed model");
    run->add_option("--machine", machine_path, "explicit machine document path");
    run->add_flag("--strict-inputs", strict_inputs, "reject inputs outside the alphabet");

    auto* compare = app.add_subcommand("compare", "deviation report between two trace CSVs");
    std::string trace_a, trace_b;
    compare->add_option("a", trace_a, "first trace CSV")->required();
    compare->add_option("b", trace_b, "second trace CSV")->required();

    auto* bench = app.add_subcommand("bench", "timing and artifact-size comparison");
    int reps_override = -1;
    bench->add_option("--repetitions", reps_override, "override repetition count");

    for (auto* sub : {build, explore, synthesize, run, compare, bench})
        sub->fallthrough(); // global options may follow the subcommand

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return 0; // --help
        std::cerr << "error: code=" << VGS_ERR_CONFIG << " " << e.what() << "\n";
        return VGS_ERR_CONFIG;
    }

    try {
        const bool graph_required = !compare->parsed() && !synthesize->parsed();
        RunConfig cfg = load_config(config_path, graph_required);
        if (!out_override.empty())
            cfg.out_dir = out_override;
        if (!level_args.empty())
            cfg.levels = level_args;
        if (reps_override > 0)
            cfg.repetitions = reps_override;
        for (int level : cfg.levels)
            if (level < 1 || level > 3)
                fail(VGS_ERR_CONFIG, "levels must be within 1..3");

        if (build->parsed())
            return cmd_build(cfg, seed_note);
        if (explore->parsed())
            return cmd_explore(cfg, seed_note);
        if (synthesize->parsed())
            return cmd_synthesize(cfg, seed_note);
        if (run->parsed())
            return cmd_run(cfg, seed_note, run_level, run_mdt4, machine_path, strict_inputs);
        if (compare->parsed())
            return cmd_compare(cfg, trace_a, trace_b);
        if (bench->parsed())
            return cmd_bench(cfg);
        fail(VGS_ERR_CONFIG, "unknown subcommand");
    } catch (const CliError& e) {
        std::cerr << "error: code=" << e.code << " " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: code=" << VGS_ERR_MODEL << " " << e.what() << "\n";
        return VGS_ERR_MODEL;
    }
    return 0;
}
