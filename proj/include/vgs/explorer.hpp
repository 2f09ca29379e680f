#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vgs/model.hpp"
#include "vgs/signals.hpp"

namespace vgs::explore {

/// Configuration of the black-box discovery run. Every model input is given
/// a value set; an input with a single value is held constant and excluded
/// from the abstraction.
struct ExplorationConfig {
    std::vector<std::pair<std::string, std::vector<double>>> input_values;
    double settle_time_s = 3.0;
    double sample_cycle_s = 1e-3;
    double stability_window_s = 0.5;
    double default_tolerance = 1.0;                // per continuous output unit
    std::map<std::string, double> tolerances;      // per-output override
    int max_states = 256;

    void validate() const;
    double tolerance_for(const std::string& output_name) const;
};

/// One discovered stable state: its number (1-based, in discovery order),
/// the stable output vector, and the input sequence that reaches it from
/// reset (each combination held for settle_time).
struct StateRecord {
    int number = 0;
    std::vector<double> stable_outputs;
    std::vector<std::vector<double>> reach_sequence;
};

/// One discovered transition. start_state 0 denotes the pre-init transition
/// into the initial state. settle_ms[j] is the time output j needs to reach
/// its new stable value; trajectories[j] holds that output's samples, one
/// per sample cycle, trajectory length = settle_ms[j] / cycle.
struct TransitionRecord {
    int start_state = 0;
    std::vector<double> input_values;
    int target_state = 0;
    std::vector<double> settle_ms;
    std::vector<std::vector<double>> trajectories;
};

struct DiscoveryResult {
    IoSignature inputs;  // relevant (multi-valued) inputs, model order
    IoSignature outputs;
    ExplorationConfig config;
    std::string model_hash;
    std::string config_hash;
    long evaluations = 0; // number of settle simulations run, including the initial one
    std::vector<StateRecord> states;
    std::vector<TransitionRecord> transitions;

    const TransitionRecord* find_transition(int start, const std::vector<double>& guard) const;
    std::vector<std::vector<double>> alphabet() const; // all input combinations, canonical order
    void validate() const; // throws ExplorationError on structural violations
};

/// Verdict of the stability check over the trailing window of a recording.
struct StableVerdict {
    bool stable = false;
    std::vector<double> values; // final sample when stable
};

/// samples[i] is the output vector recorded at time (i+1)·cycle. Stable iff
/// over the trailing window every continuous output's peak-to-peak range is
/// within its tolerance and every discrete output is constant.
StableVerdict detect_stable(const std::vector<std::vector<double>>& samples,
                            const IoSignature& outputs, double window_s, double cycle_s,
                            const std::vector<double>& tolerances);

/// First known state matching the given stable outputs (continuous within
/// tolerance, discrete exact); nullopt if none. Two matches mean the
/// tolerance is too loose and raise ExplorationError.
std::optional<int> match_state(const std::vector<double>& outputs, const IoSignature& signature,
                               const std::vector<StateRecord>& known,
                               const std::vector<double>& tolerances);

/// Per-output settle times: the first time on the sample grid from which
/// the output stays within tolerance of its final value; 0 if it never
/// leaves the band. The trajectory must end settled.
std::vector<double> settle_times_ms(const std::vector<std::vector<double>>& samples,
                                    const IoSignature& outputs,
                                    const std::vector<double>& final_values,
                                    const std::vector<double>& tolerances, double cycle_s);

/// Breadth-first discovery of states and transitions of a black-box model.
/// States are expanded in discovery order and input combinations are
/// enumerated with the first input varying fastest, which pins the state
/// numbering. Each (state, combination) evaluation is an independent
/// reset+replay, so evaluations of an already-known frontier could run
/// concurrently and be committed in this canonical order; the
/// implementation is single-threaded and the result is identical either
/// way.
DiscoveryResult explore(BlackBoxModel& model, const ExplorationConfig& cfg);

/// Reset the model and hold each combination for settle_time, returning the
/// sampled output trace. Leaves the model positioned at the sequence's end.
Trace replay(BlackBoxModel& model, const std::vector<std::vector<double>>& sequence,
             const ExplorationConfig& cfg);

/// Raised when a (state, input combination) evaluation never stabilizes.
class UnstableError : public ExplorationError {
public:
    UnstableError(int state, const std::vector<double>& combination, const std::string& detail);
    int state() const noexcept { return state_; }
    const std::vector<double>& combination() const noexcept { return combination_; }

private:
    int state_;
    std::vector<double> combination_;
};

/// Raised when the state budget is exhausted; carries the partial result.
class StateBudgetError : public ExplorationError {
public:
    StateBudgetError(int max_states, std::shared_ptr<DiscoveryResult> partial);
    const DiscoveryResult& partial() const { return *partial_; }

private:
    std::shared_ptr<DiscoveryResult> partial_;
};

} // namespace vgs::explore
