#pragma once

#include <string>
#include <vector>

#include "vgs/errors.hpp"

namespace vgs {

/// Time-indexed record of signal values, the common currency for model
/// comparison, export and benchmarking.
struct Trace {
    std::vector<std::string> signals;
    std::vector<double> times;              // strictly increasing, s
    std::vector<std::vector<double>> rows;  // rows[i] aligned with times[i]
    double period_s = 0.0;                  // 0 = irregular/unknown
    std::string source;                     // e.g. "mdt4", "mdt1"
    std::vector<std::string> warnings;

    std::size_t row_count() const { return times.size(); }

    void append(double t, std::vector<double> values) {
        if (!times.empty() && t <= times.back())
            throw IoError("trace time must be strictly increasing");
        if (values.size() != signals.size())
            throw IoError("trace row width must match signal count");
        times.push_back(t);
        rows.push_back(std::move(values));
    }

    void validate() const {
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (i > 0 && times[i] <= times[i - 1])
                throw IoError("trace row " + std::to_string(i) + ": non-increasing time");
            if (rows[i].size() != signals.size())
                throw IoError("trace row " + std::to_string(i) + ": ragged row");
        }
    }

    int column(const std::string& name) const {
        for (std::size_t j = 0; j < signals.size(); ++j)
            if (signals[j] == name)
                return static_cast<int>(j);
        return -1;
    }
};

/// Timed input schedule: each step sets the named inputs to new values at
/// time t and holds them until the next step. Inputs start at 0.
struct ScriptStep {
    double t = 0.0;
    std::vector<std::pair<std::string, double>> values;
};

struct InputScript {
    double duration_s = 0.0;
    std::vector<ScriptStep> steps; // non-decreasing times

    void validate() const {
        if (!(duration_s > 0.0))
            throw ConfigError("script duration must be > 0");
        for (std::size_t i = 1; i < steps.size(); ++i)
            if (steps[i].t < steps[i - 1].t)
                throw ConfigError("script step times must be non-decreasing");
    }
};

} // namespace vgs
