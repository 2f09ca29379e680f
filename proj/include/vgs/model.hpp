#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vgs/pneumo.hpp"
#include "vgs/signals.hpp"
#include "vgs/trace.hpp"

namespace vgs {

/// Executable behavior model seen purely through its inputs and outputs.
/// The exploration machinery never looks inside.
class BlackBoxModel {
public:
    virtual ~BlackBoxModel() = default;

    virtual const IoSignature& input_signature() const = 0;
    virtual const IoSignature& output_signature() const = 0;

    virtual void reset() = 0;
    virtual void step(std::span<const double> inputs, double dt) = 0;
    virtual void read_outputs(std::span<double> out) const = 0;

    std::vector<double> outputs() const {
        std::vector<double> out(output_signature().size());
        read_outputs(out);
        return out;
    }

    /// Optional state snapshot/restore. A model that supports it lets the
    /// explorer short-circuit reach-sequence replay; results are identical
    /// either way because stepping is deterministic.
    virtual bool supports_snapshot() const { return false; }
    virtual std::vector<double> snapshot() const { throw ModelError("snapshot not supported"); }
    virtual void restore(std::span<const double>) { throw ModelError("restore not supported"); }

    /// Stable identity of the model's structure and parameters.
    virtual std::string content_hash() const = 0;
};

enum class OutputRole { vacuum, h2, pdi_byte };

struct OutputBinding {
    std::string name;
    OutputRole role = OutputRole::vacuum;
    int node = -1;
    pneumo::ThresholdConfig thresholds;
    double resolution = 1.0; // sensor quantization, mbar

    SignalKind kind() const {
        return role == OutputRole::vacuum ? SignalKind::continuous : SignalKind::discrete;
    }
};

/// Assembled MDT-4 model: pneumatic node network integrated with fixed-step
/// RK4. The sample step visible to callers is subdivided into solver
/// substeps so that stiff short hoses stay inside the explicit stability
/// region.
class DetailedModel final : public BlackBoxModel {
public:
    /// suction_input / blow_input index into the input signature (-1 = the
    /// generator port is not externally bound and reads constant 0).
    DetailedModel(pneumo::PneumaticNetwork network, IoSignature inputs,
                  int suction_input, int blow_input,
                  std::vector<OutputBinding> outputs, double solver_dt_s,
                  std::string content_hash);

    const IoSignature& input_signature() const override { return inputs_; }
    const IoSignature& output_signature() const override { return output_signature_; }

    void reset() override;
    void step(std::span<const double> inputs, double dt) override;
    void read_outputs(std::span<double> out) const override;

    bool supports_snapshot() const override { return true; }
    std::vector<double> snapshot() const override { return pressures_; }
    void restore(std::span<const double> state) override;

    std::string content_hash() const override { return hash_; }

    const pneumo::PneumaticNetwork& network() const { return network_; }
    const std::vector<OutputBinding>& output_bindings() const { return bindings_; }
    double solver_dt_s() const { return solver_dt_; }
    double total_volume() const { return network_.total_volume(); }
    std::span<const double> pressures() const { return pressures_; }

private:
    pneumo::PneumaticNetwork network_;
    IoSignature inputs_;
    std::vector<OutputBinding> bindings_;
    IoSignature output_signature_;
    double solver_dt_;
    std::string hash_;
    int suction_index_ = -1;
    int blow_index_ = -1;
    std::vector<double> pressures_;
    pneumo::Rk4Workspace workspace_;
};

/// Drive any black-box model with a timed input script, sampling all inputs
/// and outputs every dt. Row 0 holds the initial outputs at t = 0.
Trace run_model(BlackBoxModel& model, const InputScript& script, double dt);

} // namespace vgs
