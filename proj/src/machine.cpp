#include "vgs/machine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vgs::machine {

namespace {

constexpr double time_eps_s = 1e-9;

std::string vector_text(std::span<const double> values) {
    std::string out = "(";
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out += ", ";
        std::snprintf(buf, sizeof buf, "%g", values[i]);
        out += buf;
    }
    return out + ")";
}

} // namespace

MdtLevel level_from_int(int level) {
    if (level < 1 || level > 3)
        throw ConfigError("modeling depth must be 1, 2 or 3; got " + std::to_string(level));
    return static_cast<MdtLevel>(level);
}

double MachineTransition::max_delay_ms() const {
    double m = 0.0;
    for (double d : delays_ms)
        m = std::max(m, d);
    return m;
}

const MachineState& AbstractMachine::state(int id) const {
    for (const auto& s : states)
        if (s.id == id)
            return s;
    throw ModelError("machine has no state " + std::to_string(id));
}

const MachineTransition* AbstractMachine::guard_lookup(int state_id,
                                                       std::span<const double> in) const {
    for (const auto& t : transitions) {
        if (t.start_state != state_id || t.guard.size() != in.size())
            continue;
        if (std::equal(t.guard.begin(), t.guard.end(), in.begin()))
            return &t;
    }
    return nullptr;
}

bool AbstractMachine::input_in_alphabet(std::span<const double> in) const {
    if (in.size() != inputs.size())
        return false;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& values = inputs[i].values;
        if (std::find(values.begin(), values.end(), in[i]) == values.end())
            return false;
    }
    return true;
}

void AbstractMachine::validate() const {
    if (level != MdtLevel::mdt1 && level != MdtLevel::mdt2 && level != MdtLevel::mdt3)
        throw ModelError("machine level out of range");
    if (!(cycle_s > 0.0))
        throw ModelError("machine cycle must be > 0");
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].id != static_cast<int>(i) + 1)
            throw ModelError("machine state ids must be contiguous from 1");
        if (states[i].outputs.size() != outputs.size())
            throw ModelError("state " + std::to_string(states[i].id) + ": output width mismatch");
    }
    auto check_transition = [&](const MachineTransition& t, bool pre_init) {
        if (pre_init != (t.start_state == 0))
            throw ModelError("unexpected transition start state " + std::to_string(t.start_state));
        if (!pre_init && (t.start_state < 1 || t.start_state > static_cast<int>(states.size())))
            throw ModelError("transition start state out of range");
        if (t.target_state < 1 || t.target_state > static_cast<int>(states.size()))
            throw ModelError("transition target state out of range");
        if (t.guard.size() != inputs.size())
            throw ModelError("guard width does not match the input signature");
        if (level == MdtLevel::mdt1 || pre_init) {
            if (!t.delays_ms.empty() || !t.trajectories.empty())
                throw ModelError("instantaneous transition must not carry delays or trajectories");
            return;
        }
        if (t.delays_ms.size() != outputs.size())
            throw ModelError("transition delays width mismatch");
        if (level == MdtLevel::mdt2) {
            if (!t.trajectories.empty())
                throw ModelError("depth-2 machine must not carry trajectories");
            return;
        }
        if (t.trajectories.size() != outputs.size())
            throw ModelError("transition trajectories width mismatch");
        for (std::size_t j = 0; j < outputs.size(); ++j) {
            const auto expected =
                static_cast<std::size_t>(std::llround(t.delays_ms[j] / 1000.0 / cycle_s));
            if (t.trajectories[j].size() != expected)
                throw ModelError("trajectory length must equal delay divided by cycle");
        }
    };
    check_transition(initial, true);
    for (const auto& t : transitions) {
        check_transition(t, false);
        for (const auto& other : transitions)
            if (&other != &t && other.start_state == t.start_state && other.guard == t.guard)
                throw ModelError("duplicate guard at state " + std::to_string(t.start_state));
    }
}

AbstractMachine synthesize(const explore::DiscoveryResult& discovery, MdtLevel level) {
    try {
        discovery.validate();
    } catch (const Error& e) {
        throw ModelError(std::string("synthesis refused, discovery invariants violated: ") +
                         e.what());
    }

    AbstractMachine m;
    m.level = level;
    m.inputs = discovery.inputs;
    m.outputs = discovery.outputs;
    m.cycle_s = discovery.config.sample_cycle_s;
    m.model_hash = discovery.model_hash;
    m.config_hash = discovery.config_hash;

    for (const auto& s : discovery.states)
        m.states.push_back({s.number, s.stable_outputs});

    int next_id = 0;
    for (const auto& t : discovery.transitions) {
        MachineTransition mt;
        mt.id = next_id;
        mt.start_state = t.start_state;
        mt.guard = t.input_values;
        mt.target_state = t.target_state;
        if (t.start_state != 0 && level != MdtLevel::mdt1) {
            mt.delays_ms = t.settle_ms;
            if (level == MdtLevel::mdt3)
                mt.trajectories = t.trajectories;
        }
        if (t.start_state == 0) {
            mt.id = -1;
            m.initial = std::move(mt);
        } else {
            ++next_id;
            m.transitions.push_back(std::move(mt));
        }
    }

    m.validate();
    return m;
}

MachineRuntime::MachineRuntime(const AbstractMachine& machine, UnknownInputPolicy policy)
    : machine_(machine), policy_(policy) {
    machine_.validate();
    reset();
}

void MachineRuntime::reset() {
    clock_ = 0.0;
    pending_ = -1;
    warnings_.clear();
    unknown_active_ = false;
    arrive(machine_.initial_state());
}

void MachineRuntime::arrive(int state_id) {
    state_ = state_id;
    pending_ = -1;
    outputs_ = machine_.state(state_id).outputs;
}

void MachineRuntime::emit_intermediate_outputs(double elapsed_s) {
    const auto& t = machine_.transitions[pending_];
    const auto& target = machine_.state(t.target_state).outputs;
    for (std::size_t j = 0; j < outputs_.size(); ++j) {
        const double delay_s = t.delays_ms[j] / 1000.0;
        if (machine_.level == MdtLevel::mdt2) {
            outputs_[j] = elapsed_s + time_eps_s >= delay_s ? target[j] : latched_[j];
            continue;
        }
        // Depth 3: trajectory sample k lies at (k+1)·cycle after entry and
        // governs up to and including its own settle time; between samples
        // the output is interpolated linearly, starting from the latched
        // value at the entry instant. Past the settle time the target
        // state's constant applies.
        const auto& traj = t.trajectories[j];
        const auto len = static_cast<long>(traj.size());
        const double pos = elapsed_s / machine_.cycle_s;
        const double snapped = std::round(pos);
        auto sample_at = [&](long k) { // value at elapsed = k·cycle
            if (k <= 0)
                return latched_[j];
            if (k > len)
                return target[j];
            return traj[static_cast<std::size_t>(k - 1)];
        };
        if (std::abs(pos - snapped) < 1e-6) {
            outputs_[j] = sample_at(std::lround(snapped));
        } else if (pos > static_cast<double>(len)) {
            outputs_[j] = target[j];
        } else {
            const long k = static_cast<long>(std::floor(pos));
            const double frac = pos - static_cast<double>(k);
            const double a = sample_at(k);
            const double b = sample_at(k + 1);
            outputs_[j] = a + (b - a) * frac;
        }
    }
}

std::span<const double> MachineRuntime::step(std::span<const double> inputs, double dt) {
    if (!(dt > 0.0))
        throw ModelError("machine step must be > 0");
    if (inputs.size() != machine_.inputs.size())
        throw ModelError("input vector does not match the machine input signature");

    const double step_start = clock_;
    clock_ += dt;

    if (pending_ >= 0) {
        // Inside an intermediate state inputs are latched; they are only
        // evaluated again once the target state has been reached.
        const auto& t = machine_.transitions[pending_];
        const double elapsed = clock_ - entry_time_;
        emit_intermediate_outputs(elapsed);
        if (elapsed + time_eps_s >= t.max_delay_ms() / 1000.0) {
            // The last capture instant still shows the recorded sample; the
            // target state's constant takes over from the next step on.
            state_ = t.target_state;
            pending_ = -1;
        }
        return outputs_;
    }

    const MachineTransition* t = machine_.guard_lookup(state_, inputs);
    if (!t) {
        if (!machine_.input_in_alphabet(inputs)) {
            if (policy_ == UnknownInputPolicy::reject)
                throw ModelError("input " + vector_text(inputs) +
                                 " is outside the discovered alphabet");
            if (!unknown_active_) {
                warnings_.push_back({step_start, "input " + vector_text(inputs) +
                                                     " is outside the discovered alphabet; holding state " +
                                                     std::to_string(state_)});
                unknown_active_ = true;
            }
        } else {
            unknown_active_ = false;
        }
        outputs_ = machine_.state(state_).outputs; // hold the state's action
        return outputs_;
    }
    unknown_active_ = false;

    if (machine_.level == MdtLevel::mdt1) {
        arrive(t->target_state);
        return outputs_;
    }

    // The intermediate starts the moment the condition is fulfilled, i.e. at
    // the beginning of this step interval; the source state's outputs stay
    // latched inside it.
    pending_ = static_cast<int>(t - machine_.transitions.data());
    entry_time_ = step_start;
    latched_ = machine_.state(state_).outputs;
    const double elapsed = clock_ - entry_time_;
    emit_intermediate_outputs(elapsed);
    if (elapsed + time_eps_s >= t->max_delay_ms() / 1000.0) {
        state_ = t->target_state;
        pending_ = -1;
    }
    return outputs_;
}

Trace run_machine(const AbstractMachine& machine, const InputScript& script, double dt,
                  UnknownInputPolicy policy) {
    MachineModel adapter(machine, policy);
    Trace trace = run_model(adapter, script, dt);
    trace.source = "mdt" + std::to_string(static_cast<int>(machine.level));
    for (const auto& w : adapter.runtime().warnings()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", w.time_s);
        trace.warnings.push_back("t=" + std::string(buf) + " " + w.message);
    }
    return trace;
}

MachineModel::MachineModel(const AbstractMachine& machine, UnknownInputPolicy policy)
    : machine_(machine), runtime_(machine, policy) {}

void MachineModel::read_outputs(std::span<double> out) const {
    const auto current = runtime_.outputs();
    std::copy(current.begin(), current.end(), out.begin());
}

std::string MachineModel::content_hash() const {
    return machine_.model_hash + "-mdt" + std::to_string(static_cast<int>(machine_.level));
}

} // namespace vgs::machine
