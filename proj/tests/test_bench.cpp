#include <doctest.h>

#include <fstream>
#include <sstream>

#include "support/test_models.hpp"
#include "vgs/bench.hpp"
#include "vgs/model_io.hpp"

using namespace vgs;
using namespace vgs::bench;

namespace {

Trace ramp_trace(double offset, double dt = 1e-3, int rows = 1000) {
    Trace t;
    t.signals = {"vacuum", "H2"};
    t.period_s = dt;
    for (int i = 0; i <= rows; ++i)
        t.append(i * dt, {0.5 * i + offset, i > rows / 2 ? 24.0 : 0.0});
    return t;
}

} // namespace

TEST_CASE("identical traces have zero deviation") {
    const auto a = ramp_trace(0.0);
    const auto report = compare_traces(a, a, {{"first", 0.0, 0.3}, {"rest", 0.3, 1.0}});
    for (const auto& s : report.signals) {
        CHECK(s.max_abs == 0.0);
        CHECK(s.mean_abs == 0.0);
        for (const auto& p : s.phases) {
            CHECK(p.max_abs == 0.0);
            CHECK(p.samples > 0);
        }
    }
}

TEST_CASE("constant offset shows up as max = mean = offset") {
    const auto report = compare_traces(ramp_trace(0.0), ramp_trace(3.0));
    CHECK(report.signals[0].max_abs == doctest::Approx(3.0));
    CHECK(report.signals[0].mean_abs == doctest::Approx(3.0));
    CHECK(report.signals[1].max_abs == 0.0);
}

TEST_CASE("comparison is symmetric on a shared grid") {
    const auto a = ramp_trace(0.0);
    const auto b = ramp_trace(1.25);
    const auto ab = compare_traces(a, b);
    const auto ba = compare_traces(b, a);
    REQUIRE(ab.signals.size() == ba.signals.size());
    for (std::size_t j = 0; j < ab.signals.size(); ++j) {
        CHECK(ab.signals[j].max_abs == ba.signals[j].max_abs);
        CHECK(ab.signals[j].mean_abs == doctest::Approx(ba.signals[j].mean_abs));
    }
}

TEST_CASE("resampling interpolates the second trace") {
    Trace coarse;
    coarse.signals = {"vacuum"};
    coarse.append(0.0, {0.0});
    coarse.append(1.0, {100.0});
    Trace fine;
    fine.signals = {"vacuum"};
    for (int i = 0; i <= 10; ++i)
        fine.append(i * 0.1, {10.0 * i}); // the exact linear interpolant
    const auto report = compare_traces(fine, coarse);
    CHECK(report.signals[0].max_abs <= 1e-9);
}

TEST_CASE("comparison errors") {
    Trace a;
    a.signals = {"x"};
    a.append(0.0, {1.0});
    Trace b;
    b.signals = {"y"};
    b.append(0.0, {1.0});
    CHECK_THROWS_WITH_AS(compare_traces(a, b), doctest::Contains("share no signals"), ConfigError);

    Trace late;
    late.signals = {"x"};
    late.append(5.0, {1.0});
    late.append(6.0, {1.0});
    Trace early;
    early.signals = {"x"};
    early.append(0.0, {1.0});
    early.append(1.0, {1.0});
    CHECK_THROWS_WITH_AS(compare_traces(early, late), doctest::Contains("overlap"), ConfigError);
}

TEST_CASE("deviation report serializes to JSON and text") {
    const auto report = compare_traces(ramp_trace(0.0), ramp_trace(2.0), {{"all", 0.0, 1.0}});
    const auto json_text = deviation_report_json(report);
    CHECK(json_text.find("\"max_abs\": 2.0") != std::string::npos);
    const auto table = deviation_report_text(report);
    CHECK(table.find("vacuum") != std::string::npos);
}

TEST_CASE("single-repetition benchmark has min = mean = max") {
    auto model = graph::assemble(vgs_test::mini_gripper_graph());
    auto discovery = explore::explore(*model, vgs_test::binary_config());
    std::vector<std::pair<std::string, std::string>> machines;
    for (int level = 1; level <= 3; ++level)
        machines.emplace_back("mdt" + std::to_string(level),
                              io::save_machine(machine::synthesize(
                                  discovery, machine::level_from_int(level))));

    InputScript script;
    script.duration_s = 0.2;
    script.steps.push_back({0.0, {{"suction", 24.0}, {"blow_off", 0.0}}});

    std::ostringstream graph_text;
    {
        std::ifstream in(vgs_test::data_file("use_case_1.vgs"));
        graph_text << in.rdbuf();
    }

    BenchOptions options;
    options.repetitions = 1;
    const auto report = run_benchmark(graph_text.str(), machines, script, 1e-3, options);
    REQUIRE(report.levels.size() == 4);
    for (const auto& level : report.levels) {
        CHECK(level.exec.min_ms == level.exec.mean_ms);
        CHECK(level.exec.mean_ms == level.exec.max_ms);
        CHECK(level.exec.min_ms > 0.0);
        CHECK(level.total.min_ms > 0.0);
    }
    CHECK(report.find("mdt4") != nullptr);
    CHECK(report.find("mdt4")->artifact_bytes > report.find("mdt3")->artifact_bytes);
    const auto json_text = timing_report_json(report);
    CHECK(json_text.find("\"label\": \"mdt4\"") != std::string::npos);
}

TEST_CASE("report invariants: mean below max, everything non-negative") {
    std::mt19937 rng(99);
    for (int i = 0; i < 20; ++i) {
        auto a = vgs_test::random_trace(rng);
        if (a.row_count() < 2)
            continue;
        auto b = a;
        for (auto& row : b.rows)
            for (auto& v : row)
                v += 0.25;
        const auto report = compare_traces(a, b);
        for (const auto& s : report.signals) {
            CHECK(s.mean_abs <= s.max_abs + 1e-12);
            CHECK(s.mean_abs >= 0.0);
        }
    }
}

TEST_CASE("benchmark aborts naming the failing level") {
    InputScript script;
    script.duration_s = 0.1;
    std::ostringstream graph_text;
    {
        std::ifstream in(vgs_test::data_file("use_case_1.vgs"));
        graph_text << in.rdbuf();
    }
    std::vector<std::pair<std::string, std::string>> machines{{"mdt2", "{broken"}};
    BenchOptions options;
    options.repetitions = 1;
    CHECK_THROWS_WITH_AS(run_benchmark(graph_text.str(), machines, script, 1e-3, options),
                         doctest::Contains("mdt2"), ModelError);
}

TEST_CASE("timing report renders an aligned table") {
    TimingReport report;
    report.repetitions = 3;
    report.dt_s = 1e-3;
    report.script_duration_s = 9.0;
    report.levels.push_back({"mdt1", 800, {1.0, 1.1, 1.2}, {1.3, 1.4, 1.5}, 0.2});
    report.levels.push_back({"mdt4", 36000, {150.0, 160.0, 170.0}, {155.0, 165.0, 175.0}, 0.03});
    const auto table = timing_report_text(report);
    CHECK(table.find("mdt1") != std::string::npos);
    CHECK(table.find("mdt4") != std::string::npos);
    CHECK(table.find("exec ms") != std::string::npos);
}
