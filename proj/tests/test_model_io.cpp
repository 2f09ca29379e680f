#include <doctest.h>

#include <random>

#include "support/test_models.hpp"
#include "vgs/graph.hpp"
#include "vgs/model_io.hpp"

using namespace vgs;
using namespace vgs::io;

TEST_CASE("machine documents round-trip exactly") {
    std::mt19937 rng(42);
    for (int i = 0; i < 100; ++i) {
        const auto machine = vgs_test::random_machine(rng);
        const auto loaded = load_machine(save_machine(machine));
        CHECK(loaded == machine);
    }
}

TEST_CASE("discovery documents round-trip exactly") {
    auto model = graph::assemble(vgs_test::mini_gripper_graph());
    auto discovery = explore::explore(*model, vgs_test::binary_config());
    auto loaded = load_discovery(save_discovery(discovery));
    CHECK(loaded.states.size() == discovery.states.size());
    for (std::size_t i = 0; i < discovery.states.size(); ++i) {
        CHECK(loaded.states[i].stable_outputs == discovery.states[i].stable_outputs);
        CHECK(loaded.states[i].reach_sequence == discovery.states[i].reach_sequence);
    }
    REQUIRE(loaded.transitions.size() == discovery.transitions.size());
    for (std::size_t i = 0; i < discovery.transitions.size(); ++i) {
        CHECK(loaded.transitions[i].settle_ms == discovery.transitions[i].settle_ms);
        CHECK(loaded.transitions[i].trajectories == discovery.transitions[i].trajectories);
    }
    CHECK(loaded.model_hash == discovery.model_hash);
    CHECK(loaded.evaluations == discovery.evaluations);
}

TEST_CASE("machine loading validates the document") {
    std::mt19937 rng(1);
    const auto machine = vgs_test::random_machine(rng);
    const auto text = save_machine(machine);

    SUBCASE("truncated document") {
        CHECK_THROWS_AS(load_machine(text.substr(0, text.size() / 2)), IoError);
    }
    SUBCASE("version mismatch") {
        auto bad = text;
        bad.replace(bad.find("\"format_version\":1"), 18, "\"format_version\":9");
        CHECK_THROWS_WITH_AS(load_machine(bad), doctest::Contains("format_version"), IoError);
    }
    SUBCASE("wrong document kind") {
        auto bad = text;
        bad.replace(bad.find("\"kind\":\"machine\""), 16, "\"kind\":\"mixtape\"");
        CHECK_THROWS_AS(load_machine(bad), SchemaError);
    }
    SUBCASE("missing field names its path") {
        try {
            load_machine(R"({"format_version":1,"kind":"machine","level":1})");
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.path().find("/cycle_s") != std::string::npos);
        }
    }
}

TEST_CASE("trace CSV round-trips exactly") {
    std::mt19937 rng(7);
    for (int i = 0; i < 100; ++i) {
        const auto trace = vgs_test::random_trace(rng);
        const auto back = read_trace_csv(write_trace_csv(trace));
        CHECK(back.signals == trace.signals);
        CHECK(back.times == trace.times);
        CHECK(back.rows == trace.rows);
        CHECK(back.source == trace.source);
        CHECK(back.warnings == trace.warnings);
        CHECK(back.period_s == trace.period_s);
    }
}

TEST_CASE("trace CSV error handling") {
    SUBCASE("header-only trace has zero rows") {
        const auto t = read_trace_csv("time_s,a,b\n");
        CHECK(t.signals == std::vector<std::string>{"a", "b"});
        CHECK(t.row_count() == 0);
    }
    SUBCASE("non-increasing time names the row") {
        CHECK_THROWS_WITH_AS(read_trace_csv("time_s,a\n0,1\n0,2\n"),
                             doctest::Contains("non-increasing"), IoError);
    }
    SUBCASE("ragged row") {
        CHECK_THROWS_WITH_AS(read_trace_csv("time_s,a,b\n0,1\n"), doctest::Contains("ragged"),
                             IoError);
    }
    SUBCASE("missing header") {
        CHECK_THROWS_AS(read_trace_csv("# only a comment\n"), IoError);
    }
}

TEST_CASE("DOT export") {
    auto model = graph::assemble(vgs_test::mini_gripper_graph());
    auto discovery = explore::explore(*model, vgs_test::binary_config());

    SUBCASE("discovery graph: three states plus the init marker, eight edges") {
        const auto dot = export_dot(discovery);
        std::size_t nodes = 0, edges = 0, pos = 0;
        for (pos = 0; (pos = dot.find("shape=circle", pos)) != std::string::npos; ++pos)
            ++nodes;
        for (pos = 0; (pos = dot.find("->", pos)) != std::string::npos; ++pos)
            ++edges;
        CHECK(nodes == 3);
        CHECK(edges == 8);
        CHECK(dot.find("__init") != std::string::npos);
    }
    SUBCASE("depth-2 graph carries one intermediate box per transition") {
        const auto dot = export_dot(machine::synthesize(discovery, machine::MdtLevel::mdt2));
        std::size_t circles = 0, boxes = 0, pos = 0;
        for (pos = 0; (pos = dot.find("shape=circle", pos)) != std::string::npos; ++pos)
            ++circles;
        for (pos = 0; (pos = dot.find("shape=box", pos)) != std::string::npos; ++pos)
            ++boxes;
        CHECK(circles == 3);
        CHECK(boxes == 7); // 10 nodes total: 3 states + 7 intermediates
    }
    SUBCASE("single-state machine") {
        vgs_test::ConstantModel constant;
        explore::ExplorationConfig cfg;
        cfg.input_values = {{"a", {0, 24}}, {"b", {0, 24}}};
        cfg.settle_time_s = 1.0;
        const auto dot = export_dot(machine::synthesize(explore::explore(constant, cfg),
                                                        machine::MdtLevel::mdt1));
        std::size_t circles = 0, edges = 0, pos = 0;
        for (pos = 0; (pos = dot.find("shape=circle", pos)) != std::string::npos; ++pos)
            ++circles;
        for (pos = 0; (pos = dot.find("->", pos)) != std::string::npos; ++pos)
            ++edges;
        CHECK(circles == 1);
        CHECK(edges == 1);
    }
    SUBCASE("output is byte-stable across regeneration") {
        auto again = explore::explore(*model, vgs_test::binary_config());
        CHECK(export_dot(discovery) == export_dot(again));
        CHECK(export_dot(machine::synthesize(discovery, machine::MdtLevel::mdt3)) ==
              export_dot(machine::synthesize(again, machine::MdtLevel::mdt3)));
    }
}

TEST_CASE("exploration config and script JSON round-trip") {
    auto cfg = vgs_test::binary_config();
    cfg.tolerances["vacuum"] = 2.5;
    cfg.max_states = 17;
    auto back = exploration_config_from_json(exploration_config_to_json(cfg));
    CHECK(back.input_values == cfg.input_values);
    CHECK(back.tolerances == cfg.tolerances);
    CHECK(back.max_states == cfg.max_states);

    InputScript script;
    script.duration_s = 9.0;
    script.steps.push_back({0.0, {{"a", 0.0}}});
    script.steps.push_back({3.0, {{"a", 24.0}, {"b", 1.5}}});
    auto script_back = script_from_json(script_to_json(script));
    CHECK(script_back.duration_s == script.duration_s);
    REQUIRE(script_back.steps.size() == 2);
    CHECK(script_back.steps[1].t == 3.0);
}

TEST_CASE("model bundle embeds graph, parameters and layout") {
    const auto text = R"(format_version = 1
[components]
ej ejector s_max=1e-3 pv_max=750
r1 reservoir volume=1e-4
[connections]
ej.port -- r1.p
[io]
input suction -> ej.suction
output vacuum <- ej.vacuum
)";
    const auto g = graph::parse_graph(text);
    auto model = graph::assemble(g);
    const auto bundle = model_bundle_json(*model, g, text);
    CHECK(bundle.find("\"graph_document\"") != std::string::npos);
    CHECK(bundle.find("\"state_vector\"") != std::string::npos);
    CHECK(bundle.find("\"blow_flow\"") != std::string::npos); // defaults materialized
    CHECK(bundle.find(model->content_hash()) != std::string::npos);
}
