#include "vgs/bench.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <sstream>

#include <json.hpp>

#include "vgs/graph.hpp"
#include "vgs/machine.hpp"
#include "vgs/model_io.hpp"

namespace vgs::bench {

using nlohmann::json;

namespace {

double interpolate(const Trace& t, int column, double time, std::size_t& cursor) {
    const auto& times = t.times;
    while (cursor + 1 < times.size() && times[cursor + 1] <= time)
        ++cursor;
    if (time <= times.front())
        return t.rows.front()[column];
    if (time >= times.back())
        return t.rows.back()[column];
    const double t0 = times[cursor];
    const double t1 = times[cursor + 1];
    const double v0 = t.rows[cursor][column];
    const double v1 = t.rows[cursor + 1][column];
    if (t1 == t0)
        return v0;
    return v0 + (v1 - v0) * (time - t0) / (t1 - t0);
}

} // namespace

DeviationReport compare_traces(const Trace& a, const Trace& b,
                               const std::vector<PhaseSpec>& phases) {
    a.validate();
    b.validate();
    if (a.times.empty() || b.times.empty())
        throw ConfigError("compare: traces must not be empty");

    struct SharedSignal {
        std::string name;
        int col_a;
        int col_b;
    };
    std::vector<SharedSignal> shared;
    for (std::size_t j = 0; j < a.signals.size(); ++j) {
        const int col_b = b.column(a.signals[j]);
        if (col_b >= 0)
            shared.push_back({a.signals[j], static_cast<int>(j), col_b});
    }
    if (shared.empty())
        throw ConfigError("compare: traces share no signals");

    const double from = std::max(a.times.front(), b.times.front());
    const double to = std::min(a.times.back(), b.times.back());
    if (!(from <= to))
        throw ConfigError("compare: traces have no overlapping time range");

    DeviationReport report;
    report.overlap_from_s = from;
    report.overlap_to_s = to;

    for (const auto& sig : shared) {
        SignalDeviation dev;
        dev.signal = sig.name;
        double sum = 0.0;
        long count = 0;
        std::vector<double> phase_max(phases.size(), 0.0);
        std::vector<double> phase_sum(phases.size(), 0.0);
        std::vector<long> phase_count(phases.size(), 0);
        std::size_t cursor = 0;
        for (std::size_t i = 0; i < a.times.size(); ++i) {
            const double t = a.times[i];
            if (t < from || t > to)
                continue;
            const double other = interpolate(b, sig.col_b, t, cursor);
            const double d = std::abs(a.rows[i][sig.col_a] - other);
            if (d > dev.max_abs) {
                dev.max_abs = d;
                dev.max_at_s = t;
            }
            sum += d;
            ++count;
            for (std::size_t p = 0; p < phases.size(); ++p) {
                if (t < phases[p].from_s || t > phases[p].to_s)
                    continue;
                phase_max[p] = std::max(phase_max[p], d);
                phase_sum[p] += d;
                ++phase_count[p];
            }
        }
        dev.mean_abs = count ? sum / static_cast<double>(count) : 0.0;
        report.samples = count;
        for (std::size_t p = 0; p < phases.size(); ++p)
            dev.phases.push_back({phases[p].name, phase_max[p],
                                  phase_count[p] ? phase_sum[p] / phase_count[p] : 0.0,
                                  phase_count[p]});
        report.signals.push_back(std::move(dev));
    }
    return report;
}

std::string deviation_report_json(const DeviationReport& r) {
    json doc;
    doc["overlap_from_s"] = r.overlap_from_s;
    doc["overlap_to_s"] = r.overlap_to_s;
    doc["samples"] = r.samples;
    json signals = json::array();
    for (const auto& s : r.signals) {
        json e;
        e["signal"] = s.signal;
        e["max_abs"] = s.max_abs;
        e["mean_abs"] = s.mean_abs;
        e["max_at_s"] = s.max_at_s;
        json phases = json::array();
        for (const auto& p : s.phases) {
            json pe;
            pe["phase"] = p.phase;
            pe["max_abs"] = p.max_abs;
            pe["mean_abs"] = p.mean_abs;
            pe["samples"] = p.samples;
            phases.push_back(std::move(pe));
        }
        e["phases"] = std::move(phases);
        signals.push_back(std::move(e));
    }
    doc["signals"] = std::move(signals);
    return doc.dump(2) + "\n";
}

std::string deviation_report_text(const DeviationReport& r) {
    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "overlap %.6g .. %.6g s, %ld samples\n", r.overlap_from_s,
                  r.overlap_to_s, r.samples);
    out << buf;
    std::snprintf(buf, sizeof buf, "%-16s %12s %12s %10s\n", "signal", "max_abs", "mean_abs",
                  "max_at_s");
    out << buf;
    for (const auto& s : r.signals) {
        std::snprintf(buf, sizeof buf, "%-16s %12.6g %12.6g %10.4g\n", s.signal.c_str(), s.max_abs,
                      s.mean_abs, s.max_at_s);
        out << buf;
        for (const auto& p : s.phases) {
            std::snprintf(buf, sizeof buf, "  phase %-12s max %.6g mean %.6g (%ld samples)\n",
                          p.phase.c_str(), p.max_abs, p.mean_abs, p.samples);
            out << buf;
        }
    }
    return out.str();
}

const LevelTiming* TimingReport::find(const std::string& label) const {
    for (const auto& l : levels)
        if (l.label == label)
            return &l;
    return nullptr;
}

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point start) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

TimingStats stats_of(const std::vector<double>& samples) {
    TimingStats s;
    s.min_ms = *std::min_element(samples.begin(), samples.end());
    s.max_ms = *std::max_element(samples.begin(), samples.end());
    double sum = 0.0;
    for (double v : samples)
        sum += v;
    s.mean_ms = sum / static_cast<double>(samples.size());
    // Clock granularity floor keeps downstream ratios well defined.
    s.min_ms = std::max(s.min_ms, 1e-6);
    s.mean_ms = std::max(s.mean_ms, 1e-6);
    s.max_ms = std::max(s.max_ms, 1e-6);
    return s;
}

struct Subject {
    std::string label;
    std::size_t artifact_bytes = 0;
    std::function<void()> run_fresh;    // construct + run
    std::function<void()> prepare;      // construct once
    std::function<void()> run_prepared; // run only
};

LevelTiming measure(const Subject& subject, int repetitions, bool parallel) {
    LevelTiming timing;
    timing.label = subject.label;
    timing.artifact_bytes = subject.artifact_bytes;

    auto run_series = [&](const std::function<void()>& fn) {
        std::vector<double> samples(static_cast<std::size_t>(repetitions));
        if (parallel) {
            std::vector<std::future<double>> futures;
            futures.reserve(samples.size());
            for (int i = 0; i < repetitions; ++i)
                futures.push_back(std::async(std::launch::async, [&fn] {
                    const auto start = clock_type::now();
                    fn();
                    return ms_since(start);
                }));
            for (int i = 0; i < repetitions; ++i)
                samples[static_cast<std::size_t>(i)] = futures[static_cast<std::size_t>(i)].get();
        } else {
            for (int i = 0; i < repetitions; ++i) {
                const auto start = clock_type::now();
                fn();
                samples[static_cast<std::size_t>(i)] = ms_since(start);
            }
        }
        return samples;
    };

    try {
        subject.run_fresh(); // untimed warmup absorbs first-touch effects
        timing.total = stats_of(run_series(subject.run_fresh));
        subject.prepare();
        subject.run_prepared();
        timing.exec = stats_of(run_series(subject.run_prepared));
    } catch (const Error& e) {
        throw ModelError("benchmark aborted at level '" + subject.label + "': " + e.what());
    }
    timing.construction_share =
        std::max(0.0, (timing.total.mean_ms - timing.exec.mean_ms) / timing.total.mean_ms);
    return timing;
}

} // namespace

TimingReport run_benchmark(const std::string& graph_document,
                           const std::vector<std::pair<std::string, std::string>>& machine_documents,
                           const InputScript& script, double dt, const BenchOptions& options) {
    if (options.repetitions < 1)
        throw ConfigError("benchmark repetitions must be >= 1");
    script.validate();

    TimingReport report;
    report.repetitions = options.repetitions;
    report.dt_s = dt;
    report.script_duration_s = script.duration_s;
    report.parallel = options.parallel;

    // Machine levels first (as given), detailed model last.
    for (const auto& [label, document] : machine_documents) {
        Subject subject;
        subject.label = label;
        subject.artifact_bytes = document.size();
        auto prepared = std::make_shared<std::unique_ptr<machine::AbstractMachine>>();
        const std::string* doc = &document;
        subject.run_fresh = [doc, &script, dt] {
            auto m = io::load_machine(*doc);
            run_machine(m, script, dt);
        };
        subject.prepare = [doc, prepared] {
            *prepared = std::make_unique<machine::AbstractMachine>(io::load_machine(*doc));
        };
        subject.run_prepared = [prepared, &script, dt] {
            run_machine(**prepared, script, dt);
        };
        report.levels.push_back(measure(subject, options.repetitions, options.parallel));
    }

    {
        Subject subject;
        subject.label = "mdt4";
        const auto g = graph::parse_graph(graph_document);
        const auto model_for_size = graph::assemble(g);
        subject.artifact_bytes = io::model_bundle_json(*model_for_size, g, graph_document).size();
        auto prepared = std::make_shared<std::unique_ptr<DetailedModel>>();
        subject.run_fresh = [&graph_document, &script, dt] {
            const auto parsed = graph::parse_graph(graph_document);
            auto model = graph::assemble(parsed);
            run_model(*model, script, dt);
        };
        subject.prepare = [&graph_document, prepared] {
            const auto parsed = graph::parse_graph(graph_document);
            *prepared = graph::assemble(parsed);
        };
        subject.run_prepared = [prepared, &script, dt] {
            run_model(**prepared, script, dt);
        };
        report.levels.push_back(measure(subject, options.repetitions, options.parallel));
    }

    return report;
}

std::string timing_report_json(const TimingReport& r) {
    json doc;
    doc["repetitions"] = r.repetitions;
    doc["dt_s"] = r.dt_s;
    doc["script_duration_s"] = r.script_duration_s;
    doc["parallel"] = r.parallel;
    json levels = json::array();
    for (const auto& l : r.levels) {
        json e;
        e["label"] = l.label;
        e["artifact_bytes"] = l.artifact_bytes;
        e["exec_ms"] = {{"min", l.exec.min_ms}, {"mean", l.exec.mean_ms}, {"max", l.exec.max_ms}};
        e["total_ms"] = {{"min", l.total.min_ms},
                         {"mean", l.total.mean_ms},
                         {"max", l.total.max_ms}};
        e["construction_share"] = l.construction_share;
        levels.push_back(std::move(e));
    }
    doc["levels"] = std::move(levels);
    return doc.dump(2) + "\n";
}

std::string timing_report_text(const TimingReport& r) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d repetitions, %.6g s script at dt=%.6g s%s\n", r.repetitions,
                  r.script_duration_s, r.dt_s, r.parallel ? " (parallel)" : "");
    out << buf;
    std::snprintf(buf, sizeof buf, "%-8s %12s %34s %34s %8s\n", "level", "bytes",
                  "exec ms (min/mean/max)", "total ms (min/mean/max)", "constr");
    out << buf;
    for (const auto& l : r.levels) {
        std::snprintf(buf, sizeof buf, "%-8s %12zu %10.3f/%10.3f/%10.3f %10.3f/%10.3f/%10.3f %7.1f%%\n",
                      l.label.c_str(), l.artifact_bytes, l.exec.min_ms, l.exec.mean_ms,
                      l.exec.max_ms, l.total.min_ms, l.total.mean_ms, l.total.max_ms,
                      100.0 * l.construction_share);
        out << buf;
    }
    return out.str();
}

} // namespace vgs::bench
