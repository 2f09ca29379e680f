#pragma once

#include <span>
#include <string>
#include <vector>

#include "vgs/explorer.hpp"
#include "vgs/signals.hpp"
#include "vgs/trace.hpp"

namespace vgs::machine {

/// Modeling depth of a synthesized state machine. Depth 4 is the detailed
/// model itself and is never synthesized; depth 5 (spatially resolved) is
/// out of scope.
enum class MdtLevel : int { mdt1 = 1, mdt2 = 2, mdt3 = 3 };

MdtLevel level_from_int(int level);

struct MachineState {
    int id = 0;
    std::vector<double> outputs; // output action values
    bool operator==(const MachineState&) const = default;
};

struct MachineTransition {
    int id = 0;
    int start_state = 0; // 0 = pre-init
    std::vector<double> guard;
    int target_state = 0;
    std::vector<double> delays_ms;                 // per output; depth 2 and 3
    std::vector<std::vector<double>> trajectories; // per output; depth 3
    bool operator==(const MachineTransition&) const = default;

    double max_delay_ms() const;
};

/// Executable state machine with the same I/O signature as its source
/// model. Depth 1 switches instantaneously; depth 2 delays each output by
/// its recorded settle time inside an intermediate state; depth 3
/// additionally replays the recorded output trajectories.
struct AbstractMachine {
    MdtLevel level = MdtLevel::mdt1;
    IoSignature inputs;
    IoSignature outputs;
    std::vector<MachineState> states;
    MachineTransition initial; // start_state 0, entered on reset
    std::vector<MachineTransition> transitions;
    double cycle_s = 1e-3; // trajectory sample cycle (depth 3)
    std::string model_hash;
    std::string config_hash;

    bool operator==(const AbstractMachine&) const = default;

    void validate() const; // throws ModelError on structural violations
    int initial_state() const { return initial.target_state; }
    const MachineState& state(int id) const;
    const MachineTransition* guard_lookup(int state_id, std::span<const double> inputs) const;
    bool input_in_alphabet(std::span<const double> inputs) const;
};

/// Build the depth-1/2/3 machine from a discovery result. The discovery
/// must satisfy its structural invariants; otherwise synthesis is refused.
AbstractMachine synthesize(const explore::DiscoveryResult& discovery, MdtLevel level);

enum class UnknownInputPolicy {
    hold_and_warn, // remain in the current state and record a warning
    reject,        // throw
};

struct MachineWarning {
    double time_s = 0.0;
    std::string message;
};

/// Mutable execution state for one machine run; one runtime per concurrent
/// execution, the machine itself is immutable and shareable.
class MachineRuntime {
public:
    explicit MachineRuntime(const AbstractMachine& machine,
                            UnknownInputPolicy policy = UnknownInputPolicy::hold_and_warn);

    void reset();
    /// Advance the clock by dt with the given inputs held since the last
    /// step; returns the outputs at the new clock.
    std::span<const double> step(std::span<const double> inputs, double dt);

    std::span<const double> outputs() const { return outputs_; }
    int current_state() const { return state_; }
    bool in_intermediate() const { return pending_ >= 0; }
    double clock_s() const { return clock_; }
    const std::vector<MachineWarning>& warnings() const { return warnings_; }
    const AbstractMachine& machine() const { return machine_; }

private:
    void arrive(int state_id);
    void emit_intermediate_outputs(double elapsed_s);

    const AbstractMachine& machine_;
    UnknownInputPolicy policy_;
    double clock_ = 0.0;
    int state_ = 0;
    int pending_ = -1; // index into transitions while inside an intermediate
    double entry_time_ = 0.0;
    std::vector<double> latched_;
    std::vector<double> outputs_;
    std::vector<MachineWarning> warnings_;
    bool unknown_active_ = false;
};

/// Drive a machine with a timed input script sampled every dt. Inputs and
/// outputs are recorded exactly like run_model records them, so the traces
/// are directly comparable.
Trace run_machine(const AbstractMachine& machine, const InputScript& script, double dt,
                  UnknownInputPolicy policy = UnknownInputPolicy::hold_and_warn);

/// BlackBoxModel adapter over a machine, so machines can stand in wherever
/// a detailed model is accepted.
class MachineModel final : public BlackBoxModel {
public:
    explicit MachineModel(const AbstractMachine& machine,
                          UnknownInputPolicy policy = UnknownInputPolicy::hold_and_warn);

    const IoSignature& input_signature() const override { return machine_.inputs; }
    const IoSignature& output_signature() const override { return machine_.outputs; }
    void reset() override { runtime_.reset(); }
    void step(std::span<const double> inputs, double dt) override { runtime_.step(inputs, dt); }
    void read_outputs(std::span<double> out) const override;
    std::string content_hash() const override;
    const MachineRuntime& runtime() const { return runtime_; }

private:
    const AbstractMachine& machine_;
    MachineRuntime runtime_;
};

} // namespace vgs::machine
