#include "vgs/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vgs/hash.hpp"

namespace vgs::explore {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string combo_text(const std::vector<double>& combo) {
    std::string out = "(";
    for (std::size_t i = 0; i < combo.size(); ++i) {
        if (i)
            out += ", ";
        out += fmt_double(combo[i]);
    }
    return out + ")";
}

long steps_of(double duration_s, double cycle_s) {
    return std::llround(duration_s / cycle_s);
}

bool vector_matches(const std::vector<double>& a, const std::vector<double>& b,
                    const IoSignature& signature, const std::vector<double>& tolerances) {
    for (std::size_t j = 0; j < signature.size(); ++j)
        if (!value_matches(signature[j].kind, a[j], b[j], tolerances[j]))
            return false;
    return true;
}

/// Enumerate all combinations over the given value sets. The first input is
/// the fastest-varying index, which reproduces the conventional table order
/// (all values of input 1 are tried before input 2 advances).
std::vector<std::vector<double>> enumerate_combinations(
    const std::vector<std::vector<double>>& sets) {
    std::vector<std::vector<double>> combos;
    std::vector<std::size_t> digit(sets.size(), 0);
    while (true) {
        std::vector<double> combo(sets.size());
        for (std::size_t i = 0; i < sets.size(); ++i)
            combo[i] = sets[i][digit[i]];
        combos.push_back(std::move(combo));
        std::size_t i = 0;
        for (; i < sets.size(); ++i) {
            if (++digit[i] < sets[i].size())
                break;
            digit[i] = 0;
        }
        if (i == sets.size())
            break;
    }
    return combos;
}

} // namespace

void ExplorationConfig::validate() const {
    if (!(sample_cycle_s > 0.0))
        throw ConfigError("sample_cycle must be > 0");
    if (!(stability_window_s > 0.0))
        throw ConfigError("stability_window must be > 0");
    if (!(settle_time_s > stability_window_s))
        throw ConfigError("settle_time must exceed the stability window");
    if (!(default_tolerance > 0.0))
        throw ConfigError("tolerance must be > 0");
    if (max_states < 1)
        throw ConfigError("max_states must be >= 1");
    for (const auto& [name, values] : input_values)
        if (values.empty())
            throw ConfigError("value set for input '" + name + "' is empty");
    if (steps_of(settle_time_s, sample_cycle_s) < 1)
        throw ConfigError("settle_time shorter than one sample cycle");
}

double ExplorationConfig::tolerance_for(const std::string& output_name) const {
    auto it = tolerances.find(output_name);
    return it == tolerances.end() ? default_tolerance : it->second;
}

const TransitionRecord* DiscoveryResult::find_transition(int start,
                                                         const std::vector<double>& guard) const {
    for (const auto& t : transitions)
        if (t.start_state == start && t.input_values == guard)
            return &t;
    return nullptr;
}

std::vector<std::vector<double>> DiscoveryResult::alphabet() const {
    std::vector<std::vector<double>> sets;
    for (const auto& in : inputs)
        sets.push_back(in.values);
    return enumerate_combinations(sets);
}

void DiscoveryResult::validate() const {
    std::vector<double> tol;
    for (const auto& o : outputs)
        tol.push_back(config.tolerance_for(o.name));

    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = states[i];
        if (s.number != static_cast<int>(i) + 1)
            throw ExplorationError("state numbers must be contiguous from 1");
        if (s.stable_outputs.size() != outputs.size())
            throw ExplorationError("state " + std::to_string(s.number) +
                                   ": stable output width mismatch");
        for (std::size_t k = i + 1; k < states.size(); ++k)
            if (vector_matches(s.stable_outputs, states[k].stable_outputs, outputs, tol))
                throw ExplorationError("states " + std::to_string(s.number) + " and " +
                                       std::to_string(states[k].number) +
                                       " are within tolerance of each other");
    }

    const double cycle = config.sample_cycle_s;
    int pre_init = 0;
    for (const auto& t : transitions) {
        if (t.start_state == 0)
            ++pre_init;
        if (t.start_state < 0 || t.start_state > static_cast<int>(states.size()))
            throw ExplorationError("transition start state out of range");
        if (t.target_state < 1 || t.target_state > static_cast<int>(states.size()))
            throw ExplorationError("transition target state out of range");
        if (t.settle_ms.size() != outputs.size() || t.trajectories.size() != outputs.size())
            throw ExplorationError("transition record width mismatch");
        for (std::size_t j = 0; j < outputs.size(); ++j) {
            const auto expected = steps_of(t.settle_ms[j] / 1000.0, cycle);
            if (static_cast<long>(t.trajectories[j].size()) != expected)
                throw ExplorationError("trajectory length does not match settle time");
        }
        for (const auto& other : transitions) {
            if (&other == &t)
                continue;
            if (other.start_state == t.start_state && other.input_values == t.input_values)
                throw ExplorationError("duplicate transition guard at state " +
                                       std::to_string(t.start_state));
        }
    }
    if (pre_init != 1)
        throw ExplorationError("expected exactly one pre-init transition");
}

StableVerdict detect_stable(const std::vector<std::vector<double>>& samples,
                            const IoSignature& outputs, double window_s, double cycle_s,
                            const std::vector<double>& tolerances) {
    const long n = static_cast<long>(samples.size());
    const long window = steps_of(window_s, cycle_s);
    if (n < window)
        throw ExplorationError("recording shorter than the stability window");

    StableVerdict verdict;
    for (std::size_t j = 0; j < outputs.size(); ++j) {
        double lo = samples[n - window][j];
        double hi = lo;
        for (long i = n - window; i < n; ++i) {
            lo = std::min(lo, samples[i][j]);
            hi = std::max(hi, samples[i][j]);
        }
        const bool ok = outputs[j].kind == SignalKind::discrete ? hi == lo
                                                                : hi - lo <= tolerances[j];
        if (!ok)
            return verdict; // unstable
    }
    verdict.stable = true;
    verdict.values = samples.back();
    return verdict;
}

std::optional<int> match_state(const std::vector<double>& outputs, const IoSignature& signature,
                               const std::vector<StateRecord>& known,
                               const std::vector<double>& tolerances) {
    std::optional<int> found;
    for (const auto& state : known) {
        if (!vector_matches(outputs, state.stable_outputs, signature, tolerances))
            continue;
        if (found)
            throw ExplorationError("states " + std::to_string(*found) + " and " +
                                   std::to_string(state.number) +
                                   " both match the observed outputs; tolerance too loose");
        found = state.number;
    }
    return found;
}

std::vector<double> settle_times_ms(const std::vector<std::vector<double>>& samples,
                                    const IoSignature& outputs,
                                    const std::vector<double>& final_values,
                                    const std::vector<double>& tolerances, double cycle_s) {
    const long n = static_cast<long>(samples.size());
    std::vector<double> settle(outputs.size(), 0.0);
    for (std::size_t j = 0; j < outputs.size(); ++j) {
        long last_out = -1;
        for (long i = n - 1; i >= 0; --i) {
            if (!value_matches(outputs[j].kind, samples[i][j], final_values[j], tolerances[j])) {
                last_out = i;
                break;
            }
        }
        if (last_out == n - 1)
            throw ExplorationError("trajectory for output '" + outputs[j].name +
                                   "' does not end settled");
        // Sample i sits at (i+1)·cycle, so the first permanently settled
        // sample is at (last_out+2)·cycle. Scaling the cycle to ms first
        // keeps millisecond grids exact.
        settle[j] = last_out < 0 ? 0.0 : static_cast<double>(last_out + 2) * (cycle_s * 1000.0);
    }
    return settle;
}

UnstableError::UnstableError(int state, const std::vector<double>& combination,
                             const std::string& detail)
    : ExplorationError("no stable state at state " + std::to_string(state) + " under inputs " +
                       combo_text(combination) + ": " + detail +
                       "; a larger settle_time may be needed for the system to reach a stable state"),
      state_(state), combination_(combination) {}

StateBudgetError::StateBudgetError(int max_states, std::shared_ptr<DiscoveryResult> partial)
    : ExplorationError("state budget of " + std::to_string(max_states) +
                       " exceeded; partial discovery attached"),
      partial_(std::move(partial)) {}

namespace {

struct Runner {
    BlackBoxModel& model;
    const ExplorationConfig& cfg;
    std::vector<int> relevant;          // indices into the model input signature
    std::vector<double> constants;      // full input vector template
    long n_settle = 0;
    std::vector<std::vector<double>> samples; // reused recording buffer
    std::vector<double> full_inputs;

    /// Hold one combination of the relevant inputs for settle_time,
    /// recording every output sample.
    void hold(const std::vector<double>& combo) {
        full_inputs = constants;
        for (std::size_t i = 0; i < relevant.size(); ++i)
            full_inputs[relevant[i]] = combo[i];
        samples.clear();
        std::vector<double> out(model.output_signature().size());
        for (long k = 0; k < n_settle; ++k) {
            model.step(full_inputs, cfg.sample_cycle_s);
            model.read_outputs(out);
            samples.push_back(out);
        }
    }

    void hold_quiet(const std::vector<double>& combo) {
        full_inputs = constants;
        for (std::size_t i = 0; i < relevant.size(); ++i)
            full_inputs[relevant[i]] = combo[i];
        for (long k = 0; k < n_settle; ++k)
            model.step(full_inputs, cfg.sample_cycle_s);
    }
};

/// Resolve the config against the model: which inputs vary, which are held
/// constant, and the per-output tolerances.
struct Resolved {
    std::vector<int> relevant;
    std::vector<std::vector<double>> value_sets;
    std::vector<double> constants; // full-width template
    std::vector<double> tolerances;
    IoSignature relevant_signature;
};

Resolved resolve(const BlackBoxModel& model, const ExplorationConfig& cfg) {
    Resolved r;
    const auto& in_sig = model.input_signature();
    r.constants.assign(in_sig.size(), 0.0);

    for (const auto& [name, values] : cfg.input_values) {
        bool known = false;
        for (const auto& spec : in_sig)
            known = known || spec.name == name;
        if (!known)
            throw ConfigError("exploration config names unknown input '" + name + "'");
    }

    for (std::size_t i = 0; i < in_sig.size(); ++i) {
        const std::vector<double>* values = nullptr;
        for (const auto& [name, vs] : cfg.input_values)
            if (name == in_sig[i].name)
                values = &vs;
        if (!values && !in_sig[i].values.empty())
            values = &in_sig[i].values; // declared alphabet as fallback
        if (!values)
            throw ConfigError("no value set for model input '" + in_sig[i].name + "'");
        r.constants[i] = values->front();
        if (values->size() > 1) {
            r.relevant.push_back(static_cast<int>(i));
            r.value_sets.push_back(*values);
            SignalSpec spec = in_sig[i];
            spec.values = *values;
            r.relevant_signature.push_back(std::move(spec));
        }
    }

    for (const auto& [name, tol] : cfg.tolerances) {
        bool known = false;
        for (const auto& o : model.output_signature())
            known = known || o.name == name;
        if (!known)
            throw ConfigError("tolerance override names unknown output '" + name + "'");
        if (!(tol > 0.0))
            throw ConfigError("tolerance for output '" + name + "' must be > 0");
    }
    for (const auto& o : model.output_signature())
        r.tolerances.push_back(cfg.tolerance_for(o.name));
    return r;
}

std::string config_hash_of(const ExplorationConfig& cfg) {
    std::ostringstream desc;
    desc << "settle=" << fmt_double(cfg.settle_time_s)
         << ";cycle=" << fmt_double(cfg.sample_cycle_s)
         << ";window=" << fmt_double(cfg.stability_window_s)
         << ";tol=" << fmt_double(cfg.default_tolerance) << ";max_states=" << cfg.max_states;
    for (const auto& [name, values] : cfg.input_values) {
        desc << ";in " << name;
        for (double v : values)
            desc << "," << fmt_double(v);
    }
    for (const auto& [name, tol] : cfg.tolerances)
        desc << ";tol " << name << "=" << fmt_double(tol);
    return fnv1a_hex(desc.str());
}

} // namespace

DiscoveryResult explore(BlackBoxModel& model, const ExplorationConfig& cfg) {
    cfg.validate();
    Resolved res = resolve(model, cfg);
    const auto combos = enumerate_combinations(res.value_sets);
    const auto& out_sig = model.output_signature();

    auto result = std::make_shared<DiscoveryResult>();
    result->inputs = res.relevant_signature;
    result->outputs = out_sig;
    result->config = cfg;
    result->model_hash = model.content_hash();
    result->config_hash = config_hash_of(cfg);

    Runner runner{model, cfg, res.relevant, res.constants, steps_of(cfg.settle_time_s, cfg.sample_cycle_s), {}, {}};

    const bool snapshots = model.supports_snapshot();
    std::vector<std::vector<double>> state_snapshots;

    auto record_transition = [&](int start, const std::vector<double>& combo, int target,
                                 const std::vector<double>& stable) {
        TransitionRecord t;
        t.start_state = start;
        t.input_values = combo;
        t.target_state = target;
        t.settle_ms = settle_times_ms(runner.samples, out_sig, stable, res.tolerances,
                                      cfg.sample_cycle_s);
        t.trajectories.resize(out_sig.size());
        for (std::size_t j = 0; j < out_sig.size(); ++j) {
            const auto len = steps_of(t.settle_ms[j] / 1000.0, cfg.sample_cycle_s);
            t.trajectories[j].reserve(len);
            for (long i = 0; i < len; ++i)
                t.trajectories[j].push_back(runner.samples[i][j]);
        }
        result->transitions.push_back(std::move(t));
    };

    // Initial state: reset and hold the first value of every input.
    const std::vector<double> initial_combo =
        combos.empty() ? std::vector<double>{} : combos.front();
    model.reset();
    runner.hold(initial_combo);
    ++result->evaluations;
    auto verdict = detect_stable(runner.samples, out_sig, cfg.stability_window_s,
                                 cfg.sample_cycle_s, res.tolerances);
    if (!verdict.stable)
        throw UnstableError(0, initial_combo, "initial outputs keep changing");
    result->states.push_back({1, verdict.values, {initial_combo}});
    if (snapshots)
        state_snapshots.push_back(model.snapshot());
    record_transition(0, initial_combo, 1, verdict.values);

    // Breadth-first over discovered states; every input combination is
    // applied to every state. Re-applying the combination a state was
    // reached with is skipped: the state is already its settled outcome.
    for (std::size_t si = 0; si < result->states.size(); ++si) {
        for (const auto& combo : combos) {
            const auto& state = result->states[si];
            if (combo == state.reach_sequence.back())
                continue;

            if (snapshots) {
                model.restore(state_snapshots[si]);
            } else {
                model.reset();
                for (const auto& step : state.reach_sequence)
                    runner.hold_quiet(step);
            }
            runner.hold(combo);
            ++result->evaluations;

            verdict = detect_stable(runner.samples, out_sig, cfg.stability_window_s,
                                    cfg.sample_cycle_s, res.tolerances);
            if (!verdict.stable)
                throw UnstableError(state.number, combo, "outputs keep changing after settle_time");

            if (vector_matches(verdict.values, state.stable_outputs, out_sig, res.tolerances))
                continue; // no change in output values: nothing stored

            auto matched = match_state(verdict.values, out_sig, result->states, res.tolerances);
            int target;
            if (matched) {
                target = *matched;
            } else {
                if (static_cast<int>(result->states.size()) >= cfg.max_states)
                    throw StateBudgetError(cfg.max_states, result);
                target = static_cast<int>(result->states.size()) + 1;
                auto reach = state.reach_sequence;
                reach.push_back(combo);
                result->states.push_back({target, verdict.values, std::move(reach)});
                if (snapshots)
                    state_snapshots.push_back(model.snapshot());
            }
            record_transition(result->states[si].number, combo, target, verdict.values);
        }
    }

    return std::move(*result);
}

Trace replay(BlackBoxModel& model, const std::vector<std::vector<double>>& sequence,
             const ExplorationConfig& cfg) {
    cfg.validate();
    Resolved res = resolve(model, cfg);
    Runner runner{model, cfg, res.relevant, res.constants, steps_of(cfg.settle_time_s, cfg.sample_cycle_s), {}, {}};

    Trace trace;
    trace.source = "replay";
    trace.period_s = cfg.sample_cycle_s;
    for (const auto& o : model.output_signature())
        trace.signals.push_back(o.name);

    model.reset();
    trace.append(0.0, model.outputs());
    long k = 0;
    for (const auto& combo : sequence) {
        if (combo.size() != res.relevant.size())
            throw ConfigError("replay combination width does not match the relevant inputs");
        runner.hold(combo);
        for (const auto& row : runner.samples)
            trace.append(static_cast<double>(++k) * cfg.sample_cycle_s, row);
    }
    return trace;
}

} // namespace vgs::explore
