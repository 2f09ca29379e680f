#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace vgs {

enum class SignalKind {
    continuous, // compares with a tolerance
    discrete,   // compares exactly (finite alphabet, e.g. {0, 24} V or a byte)
};

struct SignalValue {
    SignalKind kind = SignalKind::continuous;
    double value = 0.0;

    static SignalValue continuous(double v) { return {SignalKind::continuous, v}; }
    static SignalValue discrete(double v) { return {SignalKind::discrete, v}; }

    /// Discrete values must be identical; continuous values match within tol.
    bool matches(const SignalValue& other, double tol) const {
        if (kind != other.kind)
            return false;
        if (kind == SignalKind::discrete)
            return value == other.value;
        return std::abs(value - other.value) <= tol;
    }
};

/// One named signal in a model's input or output signature.
struct SignalSpec {
    std::string name;
    SignalKind kind = SignalKind::continuous;
    /// Declared alphabet for discrete inputs (may be empty for outputs and
    /// continuous signals). Used as the default exploration value set.
    std::vector<double> values;

    bool operator==(const SignalSpec&) const = default;
};

using IoSignature = std::vector<SignalSpec>;

inline bool value_matches(SignalKind kind, double a, double b, double tol) {
    if (kind == SignalKind::discrete)
        return a == b;
    return std::abs(a - b) <= tol;
}

} // namespace vgs
