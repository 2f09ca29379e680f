#pragma once

#include "vgs/errors.hpp"

namespace vgs {

// Unit convention used throughout: all public interfaces speak vacuum in
// mbar relative to atmosphere (positive = below atmospheric pressure, so a
// deep vacuum is e.g. 750 mbar,rel and a slight overpressure is -12). All
// internal physics runs on absolute pressure in Pa.

inline constexpr double atmosphere_pa = 101325.0; // 1013.25 mbar
inline constexpr double pa_per_mbar = 100.0;
inline constexpr double atmosphere_mbar = atmosphere_pa / pa_per_mbar;

constexpr double vacuum_to_absolute_pa(double vacuum_mbar_rel) {
    return atmosphere_pa - pa_per_mbar * vacuum_mbar_rel;
}

constexpr double absolute_pa_to_vacuum(double absolute_pa) {
    return (atmosphere_pa - absolute_pa) / pa_per_mbar;
}

/// Absolute pressure with checked construction. Used at API boundaries;
/// hot loops work on raw doubles in Pa.
class Pressure {
public:
    static Pressure from_absolute_pa(double pa) {
        if (!(pa > 0.0))
            throw ModelError("absolute pressure must be positive, got " + std::to_string(pa));
        return Pressure(pa);
    }

    static Pressure from_vacuum_mbar_rel(double mbar_rel) {
        return from_absolute_pa(vacuum_to_absolute_pa(mbar_rel));
    }

    double absolute_pa() const noexcept { return pa_; }
    double vacuum_mbar_rel() const noexcept { return absolute_pa_to_vacuum(pa_); }

private:
    explicit Pressure(double pa) : pa_(pa) {}
    double pa_;
};

} // namespace vgs
