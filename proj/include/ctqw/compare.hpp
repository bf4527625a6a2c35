#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ctqw/csv.hpp"
#include "ctqw/dataset.hpp"
#include "ctqw/discretize.hpp"
#include "ctqw/error.hpp"
#include "ctqw/evolve.hpp"

namespace ctqw {

struct FrameMetrics {
    double time = 0.0;
    double mse = 0.0;
    double mae = 0.0;
    double max_abs_err = 0.0;
    double peak_position_err = 0.0;  // |argmax predicted - argmax truth| in grid cells
};

// First index of the maximum (ties go to the lower index).
inline std::size_t argmax(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline FrameMetrics frame_metrics(std::span<const double> predicted, std::span<const double> truth, const Grid& grid,
                                  double t) {
    if (predicted.size() != truth.size() || truth.size() != grid.size())
        fail(ErrorKind::DimensionMismatch, "frame_metrics: predicted, truth and grid widths differ");
    FrameMetrics m;
    m.time = t;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = std::abs(predicted[i] - truth[i]);
        m.mse += d * d;
        m.mae += d;
        m.max_abs_err = std::max(m.max_abs_err, d);
    }
    m.mse /= static_cast<double>(truth.size());
    m.mae /= static_cast<double>(truth.size());
    const auto pi = static_cast<double>(argmax(predicted));
    const auto ti = static_cast<double>(argmax(truth));
    m.peak_position_err = std::abs(pi - ti);
    return m;
}

// ---------------------------------------------------------------------------
// Tabulated densities at chosen (node, time) pairs.

struct TableSlice {
    std::vector<double> times;
    std::vector<std::size_t> indices;
    std::vector<double> positions;           // x of each index
    std::vector<std::vector<double>> values;  // values[row][col]: row = index, col = time
};

inline std::size_t find_frame(const EvolutionRecord& record, double t) {
    const double tolerance = 0.5 * record.config.dt * static_cast<double>(record.config.stride);
    for (std::size_t k = 0; k < record.frames.size(); ++k)
        if (std::abs(record.frames[k].time - t) <= tolerance) return k;
    fail(ErrorKind::InvalidArgument, "time " + text::format_double(t) + " was not recorded");
}

inline TableSlice table_slice(const EvolutionRecord& record, const std::vector<double>& times,
                              const std::vector<std::size_t>& indices) {
    const Grid& grid = record.config.grid;
    std::vector<std::size_t> frame_ids;
    for (double t : times) frame_ids.push_back(find_frame(record, t));
    TableSlice out{times, indices, {}, {}};
    for (std::size_t idx : indices) {
        if (idx >= grid.size())
            fail(ErrorKind::InvalidArgument, "node index " + std::to_string(idx) + " out of range [0, " +
                                                 std::to_string(grid.size()) + ")");
        out.positions.push_back(grid[idx]);
        std::vector<double> row;
        for (std::size_t f : frame_ids) row.push_back(record.frames[f].density[idx]);
        out.values.push_back(std::move(row));
    }
    return out;
}

/// Three significant digits in scientific notation, e.g. 7.73e-24.
inline std::string format_sci3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

inline std::string format_fixed(double v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string format_table(const TableSlice& table) {
    std::string out = "Index | x";
    for (double t : table.times) out += " | t=" + format_fixed(t, 2);
    out += '\n';
    for (std::size_t r = 0; r < table.indices.size(); ++r) {
        out += std::to_string(table.indices[r]) + " | " + format_fixed(table.positions[r], 3);
        for (double v : table.values[r]) out += " | " + format_sci3(v);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Surrogate vs simulation.

struct ComparisonReport {
    std::vector<FrameMetrics> frames;
    FrameMetrics mean;  // time field unused
    std::size_t clamped_count = 0;
    std::map<std::string, std::string> metadata;
};

inline std::size_t clamp_negative(Frames& frames) {
    std::size_t n = 0;
    for (auto& f : frames)
        for (double& v : f)
            if (v < 0.0) {
                v = 0.0;
                ++n;
            }
    return n;
}

/// Physical-unit predictions against the truth frames with the same times.
inline ComparisonReport build_report(const FrameSeries& truth, const FrameSeries& predicted, const Grid& grid) {
    if (predicted.size() == 0) fail(ErrorKind::InvalidArgument, "build_report: no predictions");
    if (predicted.times.size() != predicted.size())
        fail(ErrorKind::DimensionMismatch, "build_report: prediction times and frames differ in length");

    ComparisonReport report;
    Frames pred = predicted.frames;
    report.clamped_count = clamp_negative(pred);

    const double spacing = truth.size() > 1 ? truth.times[1] - truth.times[0] : 1.0;
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double t = predicted.times[k];
        while (cursor < truth.size() && truth.times[cursor] < t - 0.5 * spacing) ++cursor;
        if (cursor >= truth.size() || std::abs(truth.times[cursor] - t) > 0.5 * spacing)
            fail(ErrorKind::DimensionMismatch,
                 "build_report: horizon mismatch, no simulated frame at t=" + text::format_double(t));
        report.frames.push_back(frame_metrics(pred[k], truth.frames[cursor], grid, t));
    }

    const double count = static_cast<double>(report.frames.size());
    for (const auto& m : report.frames) {
        report.mean.mse += m.mse / count;
        report.mean.mae += m.mae / count;
        report.mean.max_abs_err += m.max_abs_err / count;
        report.mean.peak_position_err += m.peak_position_err / count;
    }
    return report;
}

/// Scaled predictions covering record frames [horizon_start, horizon_start + n).
inline ComparisonReport build_report(const EvolutionRecord& record, const Frames& scaled_predictions,
                                     const Scaler& scaler, std::size_t horizon_start) {
    if (horizon_start + scaled_predictions.size() > record.frames.size())
        fail(ErrorKind::DimensionMismatch, "build_report: horizon extends past the recorded frames");
    FrameSeries predicted;
    predicted.frames = scaler.inverse(scaled_predictions);
    for (std::size_t k = 0; k < scaled_predictions.size(); ++k)
        predicted.times.push_back(record.frames[horizon_start + k].time);
    return build_report(to_series(record.frames), predicted, record.config.grid);
}

inline void write_report_csv(std::ostream& os, const ComparisonReport& report) {
    using text::format_double;
    os << "t,mse,mae,max_abs_err,peak_position_err\n";
    for (const auto& m : report.frames)
        os << format_double(m.time) << ',' << format_double(m.mse) << ',' << format_double(m.mae) << ','
           << format_double(m.max_abs_err) << ',' << format_double(m.peak_position_err) << '\n';
    os << "mean," << format_double(report.mean.mse) << ',' << format_double(report.mean.mae) << ','
       << format_double(report.mean.max_abs_err) << ',' << format_double(report.mean.peak_position_err) << '\n';
}

inline void write_snapshot_csv(std::ostream& os, const Grid& grid, std::span<const double> ctqw,
                               std::span<const double> ml) {
    if (ctqw.size() != grid.size() || ml.size() != grid.size())
        fail(ErrorKind::DimensionMismatch, "snapshot: frame width differs from grid");
    os << "x,ctqw_density,ml_density\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << text::format_double(grid[i]) << ',' << text::format_double(ctqw[i]) << ','
           << text::format_double(std::max(ml[i], 0.0)) << '\n';
}

}  // namespace ctqw
