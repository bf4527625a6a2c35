#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctqw/csv.hpp"
#include "ctqw/dataset.hpp"
#include "ctqw/error.hpp"
#include "ctqw/evolve.hpp"

namespace ctqw {

/**
 * Whole-pipeline configuration.
 *
 * Text form is one `section.key=value` per line; `#` starts a comment.
 * Defaults reproduce the reference setup: grid [-5, 5] with 200 nodes,
 * dt = 0.05 for 100 steps, look-back 4, 80/20 split, 64 hidden units,
 * 100 epochs at lr 1e-3, seed 42.
 */
struct RunConfig {
    double grid_a = -5.0;
    double grid_b = 5.0;
    std::size_t grid_n_points = 200;

    double evolution_dt = 0.05;
    std::size_t evolution_n_steps = 100;
    NormalizationMode evolution_normalization = NormalizationMode::ell2;
    std::size_t evolution_stride = 1;

    std::size_t dataset_lookback = 4;
    double dataset_split_fraction = 0.8;

    std::size_t training_epochs = 100;
    double training_lr = 1e-3;
    std::size_t training_hidden_dim = 64;
    std::uint64_t training_rng_seed = 42;
    double training_clip = 0.0;  // 0 disables clipping

    std::string io_output_dir = "ctqw_out";

    bool operator==(const RunConfig&) const = default;

    static const std::vector<std::string_view>& keys() {
        static const std::vector<std::string_view> k = {
            "grid.a",           "grid.b",           "grid.n_points",          "evolution.dt",
            "evolution.n_steps", "evolution.normalization", "evolution.stride", "dataset.lookback",
            "dataset.split_fraction", "training.epochs", "training.lr",       "training.hidden_dim",
            "training.rng_seed", "training.clip",    "io.output_dir"};
        return k;
    }

    void set(std::string_view key, std::string_view raw) {
        const std::string_view value = text::trim(raw);
        auto real = [&] { return text::parse_double(value, key); };
        auto count = [&]() -> std::size_t {
            const long long v = text::parse_integer(value, key);
            if (v < 0) fail(ErrorKind::InvalidArgument, std::string(key) + " must not be negative");
            return static_cast<std::size_t>(v);
        };
        if (key == "grid.a") grid_a = real();
        else if (key == "grid.b") grid_b = real();
        else if (key == "grid.n_points") grid_n_points = count();
        else if (key == "evolution.dt") evolution_dt = real();
        else if (key == "evolution.n_steps") evolution_n_steps = count();
        else if (key == "evolution.normalization") {
            const auto mode = parse_normalization(value);
            if (!mode)
                fail(ErrorKind::InvalidArgument, "evolution.normalization must be ell2 or dx_weighted, got '" +
                                                     std::string(value) + "'");
            evolution_normalization = *mode;
        } else if (key == "evolution.stride") evolution_stride = count();
        else if (key == "dataset.lookback") dataset_lookback = count();
        else if (key == "dataset.split_fraction") dataset_split_fraction = real();
        else if (key == "training.epochs") training_epochs = count();
        else if (key == "training.lr") training_lr = real();
        else if (key == "training.hidden_dim") training_hidden_dim = count();
        else if (key == "training.rng_seed") training_rng_seed = count();
        else if (key == "training.clip") training_clip = real();
        else if (key == "io.output_dir") io_output_dir = std::string(value);
        else fail(ErrorKind::InvalidArgument, "unknown config key '" + std::string(key) + "'");
    }

    std::string get(std::string_view key) const {
        using text::format_double;
        if (key == "grid.a") return format_double(grid_a);
        if (key == "grid.b") return format_double(grid_b);
        if (key == "grid.n_points") return std::to_string(grid_n_points);
        if (key == "evolution.dt") return format_double(evolution_dt);
        if (key == "evolution.n_steps") return std::to_string(evolution_n_steps);
        if (key == "evolution.normalization") return std::string(to_string(evolution_normalization));
        if (key == "evolution.stride") return std::to_string(evolution_stride);
        if (key == "dataset.lookback") return std::to_string(dataset_lookback);
        if (key == "dataset.split_fraction") return format_double(dataset_split_fraction);
        if (key == "training.epochs") return std::to_string(training_epochs);
        if (key == "training.lr") return format_double(training_lr);
        if (key == "training.hidden_dim") return std::to_string(training_hidden_dim);
        if (key == "training.rng_seed") return std::to_string(training_rng_seed);
        if (key == "training.clip") return format_double(training_clip);
        if (key == "io.output_dir") return io_output_dir;
        fail(ErrorKind::InvalidArgument, "unknown config key '" + std::string(key) + "'");
    }

    std::size_t recorded_frames() const { return evolution_n_steps / evolution_stride + 1; }

    void validate() const {
        auto reject = [](const std::string& msg) { fail(ErrorKind::InvalidArgument, "config: " + msg); };
        if (!std::isfinite(grid_a) || !std::isfinite(grid_b) || grid_b <= grid_a) reject("grid.b must exceed grid.a");
        if (grid_n_points < 3) reject("grid.n_points must be at least 3");
        if (!std::isfinite(evolution_dt) || evolution_dt <= 0.0) reject("evolution.dt must be positive");
        if (evolution_n_steps < 1) reject("evolution.n_steps must be at least 1");
        if (evolution_stride < 1) reject("evolution.stride must be at least 1");
        if (dataset_lookback < 1) reject("dataset.lookback must be at least 1");
        if (!(dataset_split_fraction > 0.0 && dataset_split_fraction < 1.0))
            reject("dataset.split_fraction must lie strictly between 0 and 1");
        if (training_epochs < 1) reject("training.epochs must be at least 1");
        if (!std::isfinite(training_lr) || training_lr < 0.0) reject("training.lr must be finite and non-negative");
        if (training_hidden_dim < 1) reject("training.hidden_dim must be at least 1");
        if (!std::isfinite(training_clip) || training_clip < 0.0) reject("training.clip must be non-negative");
        if (io_output_dir.empty()) reject("io.output_dir must not be empty");
        if (recorded_frames() < dataset_lookback + 1)
            reject("evolution records " + std::to_string(recorded_frames()) + " frames, lookback " +
                   std::to_string(dataset_lookback) + " needs at least " + std::to_string(dataset_lookback + 1));
        const std::size_t windows = recorded_frames() - dataset_lookback;
        if (train_count(windows, dataset_split_fraction) < 1) reject("split leaves no training windows");
    }
};

inline RunConfig parse_config(std::string_view content, RunConfig base = {}) {
    std::size_t line_no = 0;
    for (auto line : text::split(content, '\n')) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorKind::Format, "config line " + std::to_string(line_no) + ": expected key=value");
        base.set(text::trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

inline std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (auto key : RunConfig::keys()) out += std::string(key) + "=" + cfg.get(key) + "\n";
    return out;
}

}  // namespace ctqw
