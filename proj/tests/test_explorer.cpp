#include <doctest.h>

#include <cmath>

#include "support/test_models.hpp"
#include "vgs/explorer.hpp"
#include "vgs/graph.hpp"

using namespace vgs;
using namespace vgs::explore;

namespace {

IoSignature one_continuous() { return {{"y", SignalKind::continuous, {}}}; }
IoSignature one_discrete() { return {{"y", SignalKind::discrete, {}}}; }

std::vector<std::vector<double>> column(const std::vector<double>& values) {
    std::vector<std::vector<double>> samples;
    for (double v : values)
        samples.push_back({v});
    return samples;
}

} // namespace

TEST_CASE("detect_stable") {
    const double cycle = 1e-3;
    const std::vector<double> tol{1.0};

    SUBCASE("constant trace is stable at the constant") {
        auto samples = column(std::vector<double>(1000, 42.0));
        auto verdict = detect_stable(samples, one_continuous(), 0.5, cycle, tol);
        CHECK(verdict.stable);
        CHECK(verdict.values[0] == 42.0);
    }
    SUBCASE("ramp whose window excursion exceeds the tolerance is unstable") {
        std::vector<double> ramp;
        for (int i = 0; i < 1000; ++i)
            ramp.push_back(0.003 * i); // 1.5 units over the 0.5 s window
        CHECK_FALSE(detect_stable(column(ramp), one_continuous(), 0.5, cycle, tol).stable);
    }
    SUBCASE("exponential decay settles within tolerance of its asymptote") {
        // x(t) = A(1 - e^(-t/tau)); 30 e-foldings over 3 s.
        const double A = 750.0, tau = 0.1;
        std::vector<double> xs;
        for (int i = 1; i <= 3000; ++i)
            xs.push_back(A * (1.0 - std::exp(-(i * cycle) / tau)));
        auto verdict = detect_stable(column(xs), one_continuous(), 0.5, cycle, tol);
        CHECK(verdict.stable);
        CHECK(std::abs(verdict.values[0] - A) <= tol[0]);
    }
    SUBCASE("discrete output must be constant over the window") {
        std::vector<double> xs(1000, 24.0);
        xs[990] = 0.0;
        CHECK_FALSE(detect_stable(column(xs), one_discrete(), 0.5, cycle, tol).stable);
    }
    SUBCASE("recording shorter than the window is rejected") {
        CHECK_THROWS_AS(detect_stable(column({1.0, 1.0}), one_continuous(), 0.5, cycle, tol),
                        ExplorationError);
    }
}

TEST_CASE("match_state") {
    const IoSignature sig{{"v", SignalKind::continuous, {}}, {"h", SignalKind::discrete, {}}};
    const std::vector<double> tol{1.0, 1.0};
    std::vector<StateRecord> known;
    known.push_back({1, {0.0, 0.0}, {}});
    known.push_back({2, {749.0, 24.0}, {}});

    CHECK(match_state({749.0, 24.0}, sig, known, tol) == 2);
    CHECK(match_state({749.5, 24.0}, sig, known, tol) == 2); // within tol/2
    CHECK(match_state({749.5, 0.0}, sig, known, tol) == std::nullopt); // discrete must be exact
    CHECK(match_state({300.0, 24.0}, sig, known, tol) == std::nullopt);
    CHECK(match_state({5.0, 0.0}, sig, std::vector<StateRecord>{}, tol) == std::nullopt);

    SUBCASE("two matches mean the tolerance is too loose") {
        known.push_back({3, {749.8, 24.0}, {}});
        CHECK_THROWS_AS(match_state({749.4, 24.0}, sig, known, tol), ExplorationError);
    }
}

TEST_CASE("settle_times") {
    const double cycle = 1e-3;
    const std::vector<double> tol{1.0};

    SUBCASE("constant at final settles at zero") {
        auto samples = column(std::vector<double>(500, 7.0));
        auto settle = settle_times_ms(samples, one_continuous(), {7.0}, tol, cycle);
        CHECK(settle[0] == 0.0);
    }
    SUBCASE("discrete step at sample 199 settles at 199 ms") {
        std::vector<double> xs(3000, 24.0);
        for (int i = 0; i < 198; ++i)
            xs[i] = 0.0; // first sample with the new value sits at 199 ms
        auto settle = settle_times_ms(column(xs), one_discrete(), {24.0}, tol, cycle);
        CHECK(settle[0] == 199.0);
    }
    SUBCASE("saturating exponential settles at the analytic crossing") {
        const double A = 24.0, tau = 0.05;
        std::vector<double> xs;
        for (int i = 1; i <= 3000; ++i)
            xs.push_back(A * (1.0 - std::exp(-(i * cycle) / tau)));
        // Out of band while A e^(-t/tau) > tol, so the first settled grid
        // point is ceil(tau ln(A/tol) / cycle) cycles.
        const double expected_ms = std::ceil(tau * std::log(A / tol[0]) / cycle);
        auto settle = settle_times_ms(column(xs), one_continuous(), {xs.back()}, tol, cycle);
        CHECK(settle[0] == expected_ms);
    }
    SUBCASE("a trajectory that does not end settled is rejected") {
        std::vector<double> xs(100, 0.0);
        xs.back() = 50.0;
        CHECK_THROWS_AS(settle_times_ms(column(xs), one_continuous(), {0.0}, tol, cycle),
                        ExplorationError);
    }
}

TEST_CASE("exploration config validation") {
    ExplorationConfig cfg = vgs_test::binary_config();
    CHECK_NOTHROW(cfg.validate());
    SUBCASE("window must fit inside settle time") {
        cfg.stability_window_s = 4.0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("empty value set") {
        cfg.input_values[0].second.clear();
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("unknown input name") {
        vgs_test::ConstantModel model;
        cfg.input_values.push_back({"bogus", {0.0}});
        CHECK_THROWS_AS(explore::explore(model, cfg), ConfigError);
    }
    SUBCASE("input without a value set and without a declared alphabet") {
        class Bare final : public BlackBoxModel {
        public:
            Bare() {
                inputs_ = {{"u", SignalKind::discrete, {}}};
                outputs_ = {{"y", SignalKind::continuous, {}}};
            }
            const IoSignature& input_signature() const override { return inputs_; }
            const IoSignature& output_signature() const override { return outputs_; }
            void reset() override {}
            void step(std::span<const double>, double) override {}
            void read_outputs(std::span<double> out) const override { out[0] = 0.0; }
            std::string content_hash() const override { return "bare"; }

        private:
            IoSignature inputs_, outputs_;
        };
        Bare model;
        ExplorationConfig empty;
        CHECK_THROWS_WITH_AS(explore::explore(model, empty), doctest::Contains("no value set"),
                             ConfigError);
    }
}

TEST_CASE("exploring a constant model") {
    vgs_test::ConstantModel model;
    ExplorationConfig cfg;
    cfg.input_values = {{"a", {0, 24}}, {"b", {0, 24}}};
    cfg.settle_time_s = 1.0;

    auto result = explore::explore(model, cfg);
    CHECK(result.states.size() == 1);
    CHECK(result.transitions.size() == 1);
    CHECK(result.transitions[0].start_state == 0);
    CHECK(result.evaluations == 4); // |alphabet|
    CHECK(result.alphabet().size() == 4);
}

TEST_CASE("exploring a pass-through model") {
    vgs_test::PassthroughModel model;
    ExplorationConfig cfg;
    cfg.input_values = {{"x", {0, 24}}};
    cfg.settle_time_s = 1.0;

    auto result = explore::explore(model, cfg);
    REQUIRE(result.states.size() == 2);
    CHECK(result.states[0].stable_outputs == std::vector<double>{0.0});
    CHECK(result.states[1].stable_outputs == std::vector<double>{24.0});
    REQUIRE(result.transitions.size() == 3); // pre-init + 1->2 + 2->1
    CHECK(result.find_transition(1, {24.0}) != nullptr);
    CHECK(result.find_transition(1, {24.0})->target_state == 2);
    CHECK(result.find_transition(2, {0.0}) != nullptr);
    CHECK(result.find_transition(2, {0.0})->target_state == 1);
    CHECK_NOTHROW(result.validate());
}

TEST_CASE("settle time of an input held constant excludes it from the abstraction") {
    vgs_test::ConstantModel model;
    ExplorationConfig cfg;
    cfg.input_values = {{"a", {0, 24}}, {"b", {5}}}; // b pinned to 5
    cfg.settle_time_s = 1.0;
    auto result = explore::explore(model, cfg);
    REQUIRE(result.inputs.size() == 1);
    CHECK(result.inputs[0].name == "a");
    for (const auto& t : result.transitions)
        CHECK(t.input_values.size() == 1);
}

TEST_CASE("exploring the small gripper reproduces the three-state structure") {
    auto model = graph::assemble(vgs_test::mini_gripper_graph());
    auto result = explore::explore(*model, vgs_test::binary_config());

    REQUIRE(result.states.size() == 3);
    CHECK(result.states[0].stable_outputs[0] == 0.0);
    CHECK(result.states[1].stable_outputs[0] > 700.0);
    CHECK(result.states[1].stable_outputs[1] == 24.0);
    CHECK(result.states[2].stable_outputs[0] == doctest::Approx(-12.0).epsilon(0.1));
    CHECK(result.states[2].stable_outputs[1] == 0.0);

    const std::vector<std::tuple<int, std::vector<double>, int>> expected = {
        {0, {0, 0}, 1},  {1, {24, 0}, 2},  {1, {0, 24}, 3}, {1, {24, 24}, 3},
        {2, {0, 24}, 3}, {2, {24, 24}, 3}, {3, {0, 0}, 1},  {3, {24, 0}, 2},
    };
    REQUIRE(result.transitions.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(result.transitions[i].start_state == std::get<0>(expected[i]));
        CHECK(result.transitions[i].input_values == std::get<1>(expected[i]));
        CHECK(result.transitions[i].target_state == std::get<2>(expected[i]));
    }
    CHECK_NOTHROW(result.validate());

    SUBCASE("reach soundness: replay reproduces every state's stable outputs") {
        for (const auto& s : result.states) {
            auto trace = replay(*model, s.reach_sequence, result.config);
            const auto& last = trace.rows.back();
            for (std::size_t j = 0; j < result.outputs.size(); ++j)
                CHECK(value_matches(result.outputs[j].kind, last[j], s.stable_outputs[j], 1.0));
        }
    }
    SUBCASE("absorption: a transition's guard is stable at its target") {
        for (const auto& t : result.transitions)
            CHECK(result.find_transition(t.target_state, t.input_values) == nullptr);
    }
    SUBCASE("trajectory consistency: final samples are within tolerance of the target") {
        for (const auto& t : result.transitions) {
            const auto& target = result.states[t.target_state - 1];
            for (std::size_t j = 0; j < result.outputs.size(); ++j) {
                if (t.trajectories[j].empty())
                    continue;
                CHECK(value_matches(result.outputs[j].kind, t.trajectories[j].back(),
                                    target.stable_outputs[j], 1.0));
            }
        }
    }
    SUBCASE("trajectory length equals settle time over cycle") {
        for (const auto& t : result.transitions)
            for (std::size_t j = 0; j < result.outputs.size(); ++j)
                CHECK(static_cast<double>(t.trajectories[j].size()) == t.settle_ms[j]);
    }
}

TEST_CASE("tolerance overrides must name real outputs") {
    auto model = graph::assemble(vgs_test::mini_gripper_graph());
    auto cfg = vgs_test::binary_config();
    cfg.tolerances["vacum"] = 1.0; // typo
    CHECK_THROWS_WITH_AS(explore::explore(*model, cfg), doctest::Contains("vacum"), ConfigError);
}

TEST_CASE("breadth-first order keeps reach sequences shortest-first") {
    auto model = graph::assemble(vgs_test::mini_gripper_graph());
    auto result = explore::explore(*model, vgs_test::binary_config());
    std::size_t last = 0;
    for (const auto& s : result.states) {
        CHECK(s.reach_sequence.size() >= last);
        last = s.reach_sequence.size();
    }
}

TEST_CASE("exploration is deterministic") {
    auto model = graph::assemble(vgs_test::mini_gripper_graph());
    auto a = explore::explore(*model, vgs_test::binary_config());
    auto b = explore::explore(*model, vgs_test::binary_config());
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        CHECK(a.states[i].stable_outputs == b.states[i].stable_outputs);
        CHECK(a.states[i].reach_sequence == b.states[i].reach_sequence);
    }
    REQUIRE(a.transitions.size() == b.transitions.size());
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
        CHECK(a.transitions[i].settle_ms == b.transitions[i].settle_ms);
        CHECK(a.transitions[i].trajectories == b.transitions[i].trajectories);
    }
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("snapshot positioning and full replay give identical results") {
    vgs_test::FirstOrderModel with(0.05, 1.0, true);
    vgs_test::FirstOrderModel without(0.05, 1.0, false);
    ExplorationConfig cfg;
    cfg.input_values = {{"u", {0, 12, 24}}};
    cfg.settle_time_s = 1.0;

    auto a = explore::explore(with, cfg);
    auto b = explore::explore(without, cfg);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i)
        CHECK(a.states[i].stable_outputs == b.states[i].stable_outputs);
    REQUIRE(a.transitions.size() == b.transitions.size());
    for (std::size_t i = 0; i < a.transitions.size(); ++i)
        CHECK(a.transitions[i].trajectories == b.transitions[i].trajectories);
}

TEST_CASE("enlarging a value set never removes discovered states") {
    auto model = graph::assemble(vgs_test::mini_gripper_graph());
    auto small = explore::explore(*model, vgs_test::binary_config());

    ExplorationConfig wide = vgs_test::binary_config();
    wide.input_values[0].second = {0, 12, 24};
    auto big = explore::explore(*model, wide);

    for (const auto& s : small.states) {
        bool found = false;
        for (const auto& t : big.states) {
            bool all = true;
            for (std::size_t j = 0; j < small.outputs.size(); ++j)
                all = all && value_matches(small.outputs[j].kind, s.stable_outputs[j],
                                           t.stable_outputs[j], 1.0);
            found = found || all;
        }
        CHECK(found);
    }
}

TEST_CASE("unstable evaluation names the state and combination") {
    vgs_test::FirstOrderModel slow(2.0, 1.0); // still moving after 3 s
    ExplorationConfig cfg;
    cfg.input_values = {{"u", {0, 24}}};
    try {
        explore::explore(slow, cfg);
        FAIL("expected UnstableError");
    } catch (const UnstableError& e) {
        CHECK(e.state() == 1);
        CHECK(e.combination() == std::vector<double>{24.0});
        CHECK(std::string(e.what()).find("settle_time") != std::string::npos);
    }
}

TEST_CASE("state budget error carries the partial result") {
    vgs_test::PassthroughModel model;
    ExplorationConfig cfg;
    cfg.input_values = {{"x", {0, 24}}};
    cfg.settle_time_s = 1.0;
    cfg.max_states = 1;
    try {
        explore::explore(model, cfg);
        FAIL("expected StateBudgetError");
    } catch (const StateBudgetError& e) {
        CHECK(e.partial().states.size() == 1);
        CHECK(e.partial().transitions.size() == 1);
    }
}

TEST_CASE("replay") {
    auto model = graph::assemble(vgs_test::mini_gripper_graph());
    auto cfg = vgs_test::binary_config();

    SUBCASE("empty sequence leaves a freshly reset model") {
        auto trace = replay(*model, {}, cfg);
        CHECK(trace.rows.size() == 1);
        CHECK(trace.rows[0][0] == 0.0);
    }
    SUBCASE("suction sequence reaches the vacuum state") {
        auto trace = replay(*model, {{0, 0}, {24, 0}}, cfg);
        CHECK(trace.rows.size() == 6001);
        CHECK(trace.rows.back()[0] > 700.0);
        CHECK(trace.rows.back()[1] == 24.0);
    }
}
