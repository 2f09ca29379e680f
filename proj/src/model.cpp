#include "vgs/model.hpp"

#include <algorithm>
#include <cmath>

namespace vgs {

DetailedModel::DetailedModel(pneumo::PneumaticNetwork network, IoSignature inputs,
                             int suction_input, int blow_input,
                             std::vector<OutputBinding> outputs, double solver_dt_s,
                             std::string content_hash)
    : network_(std::move(network)),
      inputs_(std::move(inputs)),
      bindings_(std::move(outputs)),
      solver_dt_(solver_dt_s),
      hash_(std::move(content_hash)),
      suction_index_(suction_input),
      blow_index_(blow_input) {
    if (!(solver_dt_ > 0.0))
        throw ModelError("solver dt must be > 0");
    output_signature_.reserve(bindings_.size());
    for (const auto& b : bindings_)
        output_signature_.push_back(SignalSpec{b.name, b.kind(), {}});
    reset();
}

void DetailedModel::reset() {
    pressures_.assign(network_.nodes.size(), atmosphere_pa);
}

void DetailedModel::restore(std::span<const double> state) {
    if (state.size() != network_.nodes.size())
        throw ModelError("snapshot size does not match model state");
    pressures_.assign(state.begin(), state.end());
}

void DetailedModel::step(std::span<const double> inputs, double dt) {
    if (inputs.size() != inputs_.size())
        throw ModelError("input vector does not match model input signature");
    if (!(dt > 0.0))
        throw ModelError("model step must be > 0");

    const double suction = suction_index_ >= 0 ? inputs[suction_index_] : 0.0;
    const double blow = blow_index_ >= 0 ? inputs[blow_index_] : 0.0;

    const auto substeps = static_cast<long>(std::ceil(dt / solver_dt_ - 1e-9));
    const double h = dt / static_cast<double>(std::max<long>(substeps, 1));
    for (long k = 0; k < std::max<long>(substeps, 1); ++k)
        pneumo::rk4_step(network_, pressures_, suction, blow, h, workspace_);
    pneumo::check_finite(network_, pressures_);
}

void DetailedModel::read_outputs(std::span<double> out) const {
    for (std::size_t j = 0; j < bindings_.size(); ++j) {
        const auto& b = bindings_[j];
        const double raw = absolute_pa_to_vacuum(pressures_[b.node]);
        const double measured = pneumo::quantize(raw, b.resolution);
        switch (b.role) {
        case OutputRole::vacuum:
            out[j] = measured;
            break;
        case OutputRole::h2:
            out[j] = pneumo::threshold_outputs(measured, b.thresholds).h2_voltage;
            break;
        case OutputRole::pdi_byte:
            out[j] = pneumo::threshold_outputs(measured, b.thresholds).pdi_byte;
            break;
        }
    }
}

Trace run_model(BlackBoxModel& model, const InputScript& script, double dt) {
    script.validate();
    if (!(dt > 0.0))
        throw ConfigError("sample step must be > 0");
    for (const auto& step : script.steps)
        for (const auto& [name, v] : step.values) {
            bool known = false;
            for (const auto& spec : model.input_signature())
                known = known || spec.name == name;
            if (!known)
                throw ConfigError("script drives unknown input '" + name + "'");
        }

    const auto& in_sig = model.input_signature();
    const auto& out_sig = model.output_signature();

    Trace trace;
    trace.period_s = dt;
    for (const auto& s : in_sig)
        trace.signals.push_back(s.name);
    for (const auto& s : out_sig)
        trace.signals.push_back(s.name);

    model.reset();
    const auto samples = static_cast<long>(std::llround(script.duration_s / dt));
    std::vector<double> outputs(out_sig.size());
    std::vector<double> inputs(in_sig.size(), 0.0);
    std::size_t next_step = 0;

    // A script step at time t takes effect for the interval starting at t:
    // the first affected output sample is the one at t + dt.
    auto apply_steps_up_to = [&](double t) {
        while (next_step < script.steps.size() && script.steps[next_step].t <= t + 1e-12) {
            for (const auto& [name, v] : script.steps[next_step].values)
                for (std::size_t i = 0; i < in_sig.size(); ++i)
                    if (in_sig[i].name == name)
                        inputs[i] = v;
            ++next_step;
        }
    };

    for (long k = 0; k <= samples; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (k > 0)
            model.step(inputs, dt); // inputs in effect since the previous sample
        apply_steps_up_to(t);
        model.read_outputs(outputs);

        std::vector<double> row;
        row.reserve(trace.signals.size());
        row.insert(row.end(), inputs.begin(), inputs.end());
        row.insert(row.end(), outputs.begin(), outputs.end());
        trace.append(t, std::move(row));
    }
    return trace;
}

} // namespace vgs
