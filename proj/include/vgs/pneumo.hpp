#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vgs/errors.hpp"
#include "vgs/units.hpp"

namespace vgs::pneumo {

/// Vacuum generator characteristic. Suction capacity falls linearly from
/// s_max at zero vacuum to zero at pv_max; blow-off drives the system toward
/// a small steady overpressure at up to blow_flow. With a check valve the
/// generator holds vacuum when idle; without one the system leaks back
/// toward 0 mbar,rel.
struct EjectorParams {
    double s_max = 0.0;             // volumetric suction capacity at zero vacuum, m³/s
    double pv_max = 0.0;            // maximum achievable vacuum, mbar,rel
    double blow_flow = 0.0;         // blow-off volumetric flow, m³/s
    double blow_overpressure = -12; // steady overpressure during blow-off, mbar,rel
    bool has_check_valve = true;

    void validate() const;
};

struct HoseParams {
    double length = 0.0;         // m
    double inner_diameter = 0.0; // m
    int segments = 8;            // spatial lumping count
    double viscosity = 1.8e-5;   // Pa·s

    double volume() const; // length · π · (inner_diameter/2)²
    void validate() const;
};

/// Vacuum switching thresholds, mbar,rel. Defaults are the loading-unit
/// standard values.
struct ThresholdConfig {
    double h2 = 550.0;
    double h3 = 500.0;
    double h4 = 600.0;
    double h5 = 750.0;

    void validate() const;
};

struct ThresholdOutputs {
    double h2_voltage = 0.0; // 0 or 24
    std::uint8_t pdi_byte = 0;
};

struct EvacuationParams {
    double volume = 0.0;   // m³
    double suction = 0.0;  // m³/s
    double p0 = 0.0;       // first pressure argument
    double pv = 0.0;       // second pressure argument
    double time_s = 0.0;   // resulting evacuation time
};

/// Coarse evacuation-time estimate t = (V/S)·ln(p0/pv). Depends on the total
/// volume only, never on its geometry. The pressure-ratio argument order is
/// kept as conventionally printed even though the naming of p0/pv is
/// ambiguous in parts of the literature; callers pass p0 >= pv > 0.
double evacuation_time_mdt2(double volume_m3, double suction_m3_s, double p0, double pv);

/// Same estimate with the argument record filled in.
EvacuationParams evacuation_time_mdt2(EvacuationParams params);

/// Hagen-Poiseuille flow resistance 128·mu·L/(π·d⁴) in Pa·s/m³.
double hose_resistance(double inner_diameter_m, double length_m, double viscosity_pa_s);

/// Net volumetric flow drawn out of the system by the vacuum generator
/// (positive = out of the system, i.e. evacuating). Signals are active when
/// non-zero. Blow-off dominates suction. When idle, a check valve holds
/// vacuum but still vents overpressure forward to 0 mbar,rel; without a
/// check valve the system leaks toward 0 from either side.
double ejector_flow(const EjectorParams& params, double p_sys_mbar_rel,
                    double suction_signal, double blow_signal);

/// Threshold comparator block: h2_voltage = 24 V iff p >= h2; PDI byte has
/// bit 4 set iff p >= h3, bit 5 iff p >= h4, bit 6 iff p >= h5.
ThresholdOutputs threshold_outputs(double p_mbar_rel, const ThresholdConfig& cfg);

/// Round a measured value to the sensor resolution (round half away from zero).
double quantize(double value, double resolution);

// --- Lumped pneumatic network -------------------------------------------

struct VolumeNode {
    std::string name;
    double volume_m3 = 0.0;
};

struct Resistor {
    int node_a = -1; // -1 = sealed end (no flow)
    int node_b = -1;
    double resistance = 0.0; // Pa·s/m³
};

struct EjectorBinding {
    int node = -1;
    EjectorParams params;
};

struct LeakPath {
    int node = -1;
    double coefficient = 0.0; // m³/(s·Pa) toward atmosphere
};

struct PneumaticNetwork {
    std::vector<VolumeNode> nodes;
    std::vector<Resistor> resistors;
    std::vector<EjectorBinding> ejectors;
    std::vector<LeakPath> leaks;
    double max_step_s = 1e-3;

    double total_volume() const;
};

/// dp/dt for every node: (p_abs/V)·Σ(volumetric flows in).
void eval_derivative(const PneumaticNetwork& net, std::span<const double> pressures,
                     double suction_signal, double blow_signal, std::span<double> dpdt);

/// Scratch vectors for repeated RK4 stepping without reallocation.
struct Rk4Workspace {
    std::vector<double> k1, k2, k3, k4, work;
    void resize(std::size_t n);
};

/// One explicit RK4 step over the node pressures. dt must be positive and
/// no larger than the network's max step.
void rk4_step(const PneumaticNetwork& net, std::span<double> pressures,
              double suction_signal, double blow_signal, double dt);
void rk4_step(const PneumaticNetwork& net, std::span<double> pressures,
              double suction_signal, double blow_signal, double dt, Rk4Workspace& ws);

/// Throws IntegrationError naming the first node whose pressure is not finite.
void check_finite(const PneumaticNetwork& net, std::span<const double> pressures);

} // namespace vgs::pneumo
