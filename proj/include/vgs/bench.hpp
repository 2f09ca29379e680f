#pragma once

#include <string>
#include <vector>

#include "vgs/trace.hpp"

namespace vgs::bench {

struct PhaseSpec {
    std::string name;
    double from_s = 0.0;
    double to_s = 0.0;
};

struct PhaseDeviation {
    std::string phase;
    double max_abs = 0.0;
    double mean_abs = 0.0;
    long samples = 0;
};

struct SignalDeviation {
    std::string signal;
    double max_abs = 0.0;
    double mean_abs = 0.0;
    double max_at_s = 0.0;
    std::vector<PhaseDeviation> phases;
};

struct DeviationReport {
    double overlap_from_s = 0.0;
    double overlap_to_s = 0.0;
    long samples = 0;
    std::vector<SignalDeviation> signals;
};

/// Per-signal absolute deviation between two traces, overall and per
/// labeled phase. b is resampled onto a's grid by linear interpolation over
/// the overlapping time range.
DeviationReport compare_traces(const Trace& a, const Trace& b,
                               const std::vector<PhaseSpec>& phases = {});

std::string deviation_report_json(const DeviationReport& r);
std::string deviation_report_text(const DeviationReport& r);

struct TimingStats {
    double min_ms = 0.0;
    double mean_ms = 0.0;
    double max_ms = 0.0;
};

struct LevelTiming {
    std::string label;
    std::size_t artifact_bytes = 0;
    TimingStats exec;          // run only, model pre-built
    TimingStats total;         // construction + run per repetition
    double construction_share = 0.0; // (total - exec) / total, of the means
};

struct TimingReport {
    int repetitions = 0;
    double dt_s = 0.0;
    double script_duration_s = 0.0;
    bool parallel = false;
    std::vector<LevelTiming> levels;

    const LevelTiming* find(const std::string& label) const;
};

std::string timing_report_json(const TimingReport& r);
std::string timing_report_text(const TimingReport& r);

struct BenchOptions {
    int repetitions = 30;
    bool parallel = false; // run repetitions concurrently (throughput mode;
                           // wall-clock statistics then overlap)
};

/// Execute the detailed model (assembled from the graph document) and the
/// given machine documents through the script, measuring pure execution and
/// execution including construction, and recording serialized artifact
/// sizes. Timing excludes all serialization of results.
TimingReport run_benchmark(const std::string& graph_document,
                           const std::vector<std::pair<std::string, std::string>>& machine_documents,
                           const InputScript& script, double dt, const BenchOptions& options);

} // namespace vgs::bench
