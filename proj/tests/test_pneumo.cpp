#include <doctest.h>

#include <cmath>
#include <cstring>

#include "support/test_models.hpp"
#include "vgs/graph.hpp"
#include "vgs/model.hpp"
#include "vgs/pneumo.hpp"

using namespace vgs;
using namespace vgs::pneumo;

namespace {

std::unique_ptr<DetailedModel> mini_model() {
    return graph::assemble(vgs_test::mini_gripper_graph());
}

InputScript hold(double suction, double blow, double duration) {
    InputScript s;
    s.duration_s = duration;
    s.steps.push_back({0.0, {{"suction", suction}, {"blow_off", blow}}});
    return s;
}

} // namespace

TEST_CASE("equilibrium: all inputs zero keeps the state atmospheric") {
    auto model = mini_model();
    auto trace = run_model(*model, hold(0, 0, 1.0), 1e-3);
    for (const auto& row : trace.rows) {
        CHECK(row[2] == 0.0); // vacuum
        CHECK(row[3] == 0.0); // H2
    }
    for (double p : model->pressures())
        CHECK(p == atmosphere_pa);
}

TEST_CASE("closed single volume conserves pressure over any horizon") {
    PneumaticNetwork net;
    net.nodes.push_back({"tank", 4e-4});
    std::vector<double> p{vacuum_to_absolute_pa(300.0)};
    Rk4Workspace ws;
    for (int i = 0; i < 5000; ++i)
        rk4_step(net, p, 0.0, 0.0, 1e-3, ws);
    CHECK(p[0] == vacuum_to_absolute_pa(300.0));
}

TEST_CASE("integrator rejects oversized steps") {
    PneumaticNetwork net;
    net.nodes.push_back({"tank", 4e-4});
    net.max_step_s = 1e-3;
    std::vector<double> p{atmosphere_pa};
    CHECK_THROWS_AS(rk4_step(net, p, 0.0, 0.0, 2e-3), ModelError);
    CHECK_THROWS_AS(rk4_step(net, p, 0.0, 0.0, 0.0), ModelError);
}

TEST_CASE("divergence error names the offending node") {
    PneumaticNetwork net;
    net.nodes.push_back({"ok", 1e-5});
    net.nodes.push_back({"broken", 1e-5});
    std::vector<double> p{atmosphere_pa, std::nan("")};
    CHECK_THROWS_WITH_AS(check_finite(net, p), doctest::Contains("broken"), IntegrationError);
}

TEST_CASE("monotone evacuation: suction only, vacuum never decreases") {
    auto model = mini_model();
    auto trace = run_model(*model, hold(24, 0, 3.0), 1e-3);
    double last = -1e9;
    for (const auto& row : trace.rows) {
        CHECK(row[2] >= last);
        last = row[2];
    }
    CHECK(last > 700.0);
}

TEST_CASE("check-valve hold: vacuum keeps its value after suction stops") {
    auto model = mini_model();
    InputScript script;
    script.duration_s = 8.0;
    script.steps.push_back({0.0, {{"suction", 24.0}, {"blow_off", 0.0}}});
    script.steps.push_back({3.0, {{"suction", 0.0}, {"blow_off", 0.0}}});
    auto trace = run_model(*model, script, 1e-3);
    const double held = trace.rows[3000][2];
    CHECK(held > 700.0);
    for (std::size_t i = 3000; i < trace.rows.size(); ++i)
        CHECK(std::abs(trace.rows[i][2] - held) <= 1.0);
}

TEST_CASE("blow-off suppresses evacuation even with suction active") {
    auto model = mini_model();
    auto trace = run_model(*model, hold(24, 24, 2.0), 1e-3);
    // The system settles at the blow-off overpressure instead of evacuating.
    CHECK(trace.rows.back()[2] == doctest::Approx(-12.0).epsilon(0.1));
    for (const auto& row : trace.rows)
        CHECK(row[2] < 50.0);
}

TEST_CASE("stepping is deterministic bit for bit") {
    auto a = mini_model();
    auto b = mini_model();
    InputScript script;
    script.duration_s = 2.0;
    script.steps.push_back({0.0, {{"suction", 24.0}, {"blow_off", 0.0}}});
    script.steps.push_back({1.0, {{"suction", 24.0}, {"blow_off", 24.0}}});
    auto ta = run_model(*a, script, 1e-3);
    auto tb = run_model(*b, script, 1e-3);
    REQUIRE(ta.rows.size() == tb.rows.size());
    for (std::size_t i = 0; i < ta.rows.size(); ++i)
        CHECK(std::memcmp(ta.rows[i].data(), tb.rows[i].data(),
                          ta.rows[i].size() * sizeof(double)) == 0);
}

TEST_CASE("reservoir evacuates at least three times faster than the equal-volume hose") {
    auto reservoir = graph::assemble(graph::parse_graph_file(
        vgs_test::data_file("test_setup_reservoir.vgs")));
    auto hose = graph::assemble(graph::parse_graph_file(vgs_test::data_file("test_setup_hose.vgs")));

    InputScript script;
    script.duration_s = 12.0;
    script.steps.push_back({0.0, {{"suction", 24.0}}});

    auto time_to_700 = [&](DetailedModel& model) {
        auto trace = run_model(model, script, 1e-3);
        const int vac = trace.column("vacuum");
        for (std::size_t i = 0; i < trace.rows.size(); ++i)
            if (trace.rows[i][vac] >= 700.0)
                return trace.times[i];
        return -1.0;
    };

    const double t_reservoir = time_to_700(*reservoir);
    const double t_hose = time_to_700(*hose);
    REQUIRE(t_reservoir > 0.0);
    REQUIRE(t_hose > 0.0);
    CHECK(t_hose / t_reservoir >= 3.0);
}

TEST_CASE("a leaking suction cup loses vacuum after suction stops") {
    const auto g = graph::parse_graph(R"(format_version = 1
[solver]
dt = 1e-4
[components]
ej  ejector      s_max=2e-3 pv_max=750 check_valve=true plenum_volume=1e-5 resolution=1
c1  suction_cup  volume=5e-6 leak=2e-9
[connections]
ej.port -- c1.p
[io]
input  suction -> ej.suction
output vacuum  <- ej.vacuum
)");
    auto model = graph::assemble(g);
    InputScript script;
    script.duration_s = 6.0;
    script.steps.push_back({0.0, {{"suction", 24.0}}});
    script.steps.push_back({2.0, {{"suction", 0.0}}});
    auto trace = run_model(*model, script, 1e-3);
    const double at_stop = trace.rows[2000][1];
    CHECK(at_stop > 600.0);
    CHECK(trace.rows.back()[1] < at_stop - 50.0); // leak drains the held vacuum
}
