#include "vgs/pneumo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vgs::pneumo {

namespace {

// Width of the linear zone around the blow-off / vent equilibria, mbar.
// Wide enough to keep the fast source terms well inside the explicit
// stability region at the default solver step.
constexpr double ramp_mbar = 200.0;

// Reverse-leak magnitude of a generator without a check valve, as a
// fraction of its suction capacity.
constexpr double backleak_fraction = 0.5;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

bool active(double signal) { return signal != 0.0; }

} // namespace

void EjectorParams::validate() const {
    if (!(s_max > 0.0))
        throw ModelError("ejector s_max must be > 0");
    if (!(pv_max > 0.0) || pv_max > 1013.0)
        throw ModelError("ejector pv_max must be in (0, 1013] mbar,rel");
    if (blow_flow < 0.0)
        throw ModelError("ejector blow_flow must be >= 0");
}

double HoseParams::volume() const {
    const double r = inner_diameter / 2.0;
    return length * std::numbers::pi * r * r;
}

void HoseParams::validate() const {
    if (!(length > 0.0))
        throw ModelError("hose length must be > 0");
    if (!(inner_diameter > 0.0))
        throw ModelError("hose inner_diameter must be > 0");
    if (segments < 1)
        throw ModelError("hose segments must be >= 1");
    if (!(viscosity > 0.0))
        throw ModelError("hose viscosity must be > 0");
}

void ThresholdConfig::validate() const {
    for (double h : {h2, h3, h4, h5})
        if (!(h > 0.0 && h < 1013.0))
            throw ModelError("threshold must be in (0, 1013) mbar,rel");
}

double evacuation_time_mdt2(double volume_m3, double suction_m3_s, double p0, double pv) {
    if (!(volume_m3 > 0.0))
        throw ModelError("evacuation time: volume must be > 0");
    if (!(suction_m3_s > 0.0))
        throw ModelError("evacuation time: suction capacity must be > 0");
    if (!(p0 > 0.0) || !(pv > 0.0))
        throw ModelError("evacuation time: pressures must be > 0");
    if (p0 < pv)
        throw ModelError("evacuation time: target beyond capability (p0 < pv)");
    return volume_m3 / suction_m3_s * std::log(p0 / pv);
}

EvacuationParams evacuation_time_mdt2(EvacuationParams params) {
    params.time_s = evacuation_time_mdt2(params.volume, params.suction, params.p0, params.pv);
    return params;
}

double hose_resistance(double inner_diameter_m, double length_m, double viscosity_pa_s) {
    if (!(inner_diameter_m > 0.0) || !(length_m > 0.0) || !(viscosity_pa_s > 0.0))
        throw ModelError("hose resistance arguments must be > 0");
    const double d4 = inner_diameter_m * inner_diameter_m * inner_diameter_m * inner_diameter_m;
    return 128.0 * viscosity_pa_s * length_m / (std::numbers::pi * d4);
}

double ejector_flow(const EjectorParams& e, double p_sys_mbar_rel,
                    double suction_signal, double blow_signal) {
    const double v = p_sys_mbar_rel;
    if (active(blow_signal)) {
        // Drive toward the blow-off overpressure from either side; negative
        // return pushes air into the system.
        return -e.blow_flow * clamp_unit((v - e.blow_overpressure) / ramp_mbar);
    }
    if (active(suction_signal))
        return e.s_max * std::max(0.0, 1.0 - v / e.pv_max);
    if (e.has_check_valve) {
        // Valve blocks backflow, so vacuum is held. Overpressure pushes the
        // valve open in its forward direction and vents to 0 mbar,rel.
        if (v >= 0.0)
            return 0.0;
        return e.s_max * std::min(1.0, -v / ramp_mbar);
    }
    // No check valve: leak toward ambient from either side.
    return -backleak_fraction * e.s_max * clamp_unit(v / ramp_mbar);
}

ThresholdOutputs threshold_outputs(double p_mbar_rel, const ThresholdConfig& cfg) {
    ThresholdOutputs out;
    out.h2_voltage = p_mbar_rel >= cfg.h2 ? 24.0 : 0.0;
    std::uint8_t byte = 0;
    if (p_mbar_rel >= cfg.h3)
        byte |= 1u << 4;
    if (p_mbar_rel >= cfg.h4)
        byte |= 1u << 5;
    if (p_mbar_rel >= cfg.h5)
        byte |= 1u << 6;
    out.pdi_byte = byte;
    return out;
}

double quantize(double value, double resolution) {
    return std::round(value / resolution) * resolution;
}

double PneumaticNetwork::total_volume() const {
    double v = 0.0;
    for (const auto& n : nodes)
        v += n.volume_m3;
    return v;
}

void eval_derivative(const PneumaticNetwork& net, std::span<const double> p,
                     double suction_signal, double blow_signal, std::span<double> dpdt) {
    std::fill(dpdt.begin(), dpdt.end(), 0.0);

    // Accumulate volumetric inflow per node, then scale by p/V.
    for (const auto& r : net.resistors) {
        if (r.node_a < 0 || r.node_b < 0)
            continue; // sealed hose end
        const double q = (p[r.node_a] - p[r.node_b]) / r.resistance; // into b
        dpdt[r.node_b] += q;
        dpdt[r.node_a] -= q;
    }
    for (const auto& e : net.ejectors) {
        const double v = absolute_pa_to_vacuum(p[e.node]);
        dpdt[e.node] -= ejector_flow(e.params, v, suction_signal, blow_signal);
    }
    for (const auto& l : net.leaks)
        dpdt[l.node] += l.coefficient * (atmosphere_pa - p[l.node]);

    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        dpdt[i] *= p[i] / net.nodes[i].volume_m3;
}

void Rk4Workspace::resize(std::size_t n) {
    k1.resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    work.resize(n);
}

void rk4_step(const PneumaticNetwork& net, std::span<double> p,
              double suction_signal, double blow_signal, double dt) {
    Rk4Workspace ws;
    rk4_step(net, p, suction_signal, blow_signal, dt, ws);
}

void rk4_step(const PneumaticNetwork& net, std::span<double> p,
              double suction_signal, double blow_signal, double dt, Rk4Workspace& ws) {
    if (!(dt > 0.0))
        throw ModelError("integrator step must be > 0");
    if (dt > net.max_step_s * (1.0 + 1e-12))
        throw ModelError("integrator step exceeds configured max step");

    const std::size_t n = p.size();
    ws.resize(n);
    auto& k1 = ws.k1;
    auto& k2 = ws.k2;
    auto& k3 = ws.k3;
    auto& k4 = ws.k4;
    auto& work = ws.work;

    eval_derivative(net, p, suction_signal, blow_signal, k1);
    for (std::size_t i = 0; i < n; ++i)
        work[i] = p[i] + 0.5 * dt * k1[i];
    eval_derivative(net, work, suction_signal, blow_signal, k2);
    for (std::size_t i = 0; i < n; ++i)
        work[i] = p[i] + 0.5 * dt * k2[i];
    eval_derivative(net, work, suction_signal, blow_signal, k3);
    for (std::size_t i = 0; i < n; ++i)
        work[i] = p[i] + dt * k3[i];
    eval_derivative(net, work, suction_signal, blow_signal, k4);
    for (std::size_t i = 0; i < n; ++i)
        p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void check_finite(const PneumaticNetwork& net, std::span<const double> p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!std::isfinite(p[i]))
            throw IntegrationError(net.nodes[i].name, "pressure is not finite");
}

} // namespace vgs::pneumo
