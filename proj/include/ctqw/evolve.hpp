#pragma once

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ctqw/csv.hpp"
#include "ctqw/discretize.hpp"
#include "ctqw/error.hpp"
#include "ctqw/spectral.hpp"
#include "ctqw/wave_state.hpp"

namespace ctqw {

/**
 * How the initial Gaussian is normalized.
 *
 * `ell2` makes sum |psi_i|^2 = 1, so densities are per-node probabilities.
 * `dx_weighted` makes sum |psi_i|^2 dx = 1, so densities approximate the
 * continuum |psi(x)|^2.
 */
enum class NormalizationMode { ell2, dx_weighted };

inline std::string_view to_string(NormalizationMode m) {
    return m == NormalizationMode::ell2 ? "ell2" : "dx_weighted";
}

inline std::optional<NormalizationMode> parse_normalization(std::string_view s) {
    if (s == "ell2") return NormalizationMode::ell2;
    if (s == "dx_weighted") return NormalizationMode::dx_weighted;
    return std::nullopt;
}

inline double weighted_norm(const WaveState& psi, NormalizationMode mode, double dx) {
    const double s = squared_norm(psi);
    return mode == NormalizationMode::ell2 ? s : s * dx;
}

struct EvolutionConfig {
    Grid grid;
    double dt = 0.05;
    std::size_t n_steps = 100;
    NormalizationMode normalization = NormalizationMode::ell2;
    std::size_t stride = 1;  // record every stride-th step

    void validate() const {
        if (!std::isfinite(dt) || dt <= 0.0) fail(ErrorKind::InvalidArgument, "evolution: dt must be positive");
        if (stride < 1) fail(ErrorKind::InvalidArgument, "evolution: stride must be at least 1");
    }
};

struct EvolutionRecord {
    EvolutionConfig config;
    std::vector<DensityFrame> frames;
    std::vector<double> conservation_log;  // |norm - 1| after each step

    double max_drift() const {
        double m = 0.0;
        for (double d : conservation_log) m = std::max(m, d);
        return m;
    }
};

// Hard abort threshold; tests assert the much tighter 1e-10.
inline constexpr double kConservationAbortThreshold = 1e-8;

/// psi_i(0) proportional to exp(-x_i^2), normalized per `mode`.
inline WaveState gaussian_initial(const Grid& grid, NormalizationMode mode = NormalizationMode::ell2) {
    std::vector<double> raw(grid.size());
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        raw[i] = std::exp(-grid[i] * grid[i]);
        sum_sq += raw[i] * raw[i];
    }
    const double weight = mode == NormalizationMode::ell2 ? 1.0 : grid.dx();
    const double norm = std::sqrt(sum_sq * weight);
    WaveState psi{std::vector<Complex>(grid.size()), 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) psi.amplitudes[i] = raw[i] / norm;
    return psi;
}

/// Steps `psi0` forward with one materialized U(dt), recording densities.
inline EvolutionRecord run_evolution(const EvolutionConfig& config, const SpectralDecomposition& spec,
                                     const WaveState& psi0) {
    config.validate();
    if (spec.size() != config.grid.size() || psi0.size() != config.grid.size())
        fail(ErrorKind::DimensionMismatch, "run_evolution: grid, Hamiltonian and state sizes differ");

    const Propagator u = build_propagator(spec, config.dt);
    const double dx = config.grid.dx();

    EvolutionRecord record{config, {}, {}};
    record.frames.reserve(config.n_steps / config.stride + 1);
    record.conservation_log.reserve(config.n_steps);

    WaveState psi = psi0;
    psi.time = 0.0;
    record.frames.push_back(density(psi));
    for (std::size_t k = 1; k <= config.n_steps; ++k) {
        psi = apply_propagator(u, psi);
        psi.time = static_cast<double>(k) * config.dt;
        const double drift = std::abs(weighted_norm(psi, config.normalization, dx) - 1.0);
        record.conservation_log.push_back(drift);
        if (!(drift <= kConservationAbortThreshold))
            fail(ErrorKind::Numerical, "run_evolution: probability drift " + text::format_double(drift) +
                                           " at step " + std::to_string(k) + " exceeds " +
                                           text::format_double(kConservationAbortThreshold));
        if (k % config.stride == 0) record.frames.push_back(density(psi));
    }
    return record;
}

inline EvolutionRecord run_evolution(const EvolutionConfig& config, const HamiltonianMatrix& h) {
    config.validate();
    if (h.size() != config.grid.size())
        fail(ErrorKind::DimensionMismatch, "run_evolution: Hamiltonian order differs from grid size");
    const SpectralDecomposition spec = eigendecompose(h);
    return run_evolution(config, spec, gaussian_initial(config.grid, config.normalization));
}

// ---------------------------------------------------------------------------
// Frame CSV: header `t,x_0,...,x_{N-1}`, one row per frame.

struct FrameSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> frames;

    std::size_t size() const { return frames.size(); }
    std::size_t width() const { return frames.empty() ? 0 : frames.front().size(); }
};

inline FrameSeries to_series(const std::vector<DensityFrame>& frames) {
    FrameSeries s;
    for (const auto& f : frames) {
        s.times.push_back(f.time);
        s.frames.push_back(f.density);
    }
    return s;
}

inline void write_frames_csv(std::ostream& os, const FrameSeries& series) {
    os << 't';
    for (std::size_t i = 0; i < series.width(); ++i) os << ",x_" << i;
    os << '\n';
    for (std::size_t k = 0; k < series.size(); ++k) {
        os << text::format_double(series.times[k]);
        for (double v : series.frames[k]) os << ',' << text::format_double(v);
        os << '\n';
    }
}

inline FrameSeries read_frames_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || text::trim(line).substr(0, 1) != "t")
        fail(ErrorKind::Format, "frames csv: missing header row");
    const std::size_t width = text::split(text::trim(line), ',').size() - 1;
    FrameSeries s;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        const auto trimmed = text::trim(line);
        if (trimmed.empty()) continue;
        const auto cells = text::split(trimmed, ',');
        if (cells.size() != width + 1)
            fail(ErrorKind::Format, "frames csv: row " + std::to_string(row) + " has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(width + 1));
        s.times.push_back(text::parse_double(cells[0], "frames csv"));
        std::vector<double> frame(width);
        for (std::size_t i = 0; i < width; ++i) frame[i] = text::parse_double(cells[i + 1], "frames csv");
        s.frames.push_back(std::move(frame));
    }
    return s;
}

inline void write_conservation_csv(std::ostream& os, const EvolutionRecord& record) {
    os << "step,t,drift\n";
    for (std::size_t k = 0; k < record.conservation_log.size(); ++k)
        os << k + 1 << ',' << text::format_double(static_cast<double>(k + 1) * record.config.dt) << ','
           << text::format_double(record.conservation_log[k]) << '\n';
}

}  // namespace ctqw
