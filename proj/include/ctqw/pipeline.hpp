#pragma once

#include <string>
#include <vector>

#include "ctqw/compare.hpp"
#include "ctqw/config.hpp"
#include "ctqw/dataset.hpp"
#include "ctqw/discretize.hpp"
#include "ctqw/evolve.hpp"
#include "ctqw/surrogate.hpp"

// Glue between RunConfig and the modules; shared by the CLI and the
// acceptance suite.
namespace ctqw::pipeline {

inline Grid grid(const RunConfig& cfg) { return make_grid(cfg.grid_a, cfg.grid_b, cfg.grid_n_points); }

inline EvolutionConfig evolution_config(const RunConfig& cfg) {
    return EvolutionConfig{grid(cfg), cfg.evolution_dt, cfg.evolution_n_steps, cfg.evolution_normalization,
                           cfg.evolution_stride};
}

inline EvolutionRecord simulate(const RunConfig& cfg) {
    const EvolutionConfig ec = evolution_config(cfg);
    return run_evolution(ec, harmonic_hamiltonian(ec.grid));
}

/// Rebuilds a record from frames read back from disk.
inline EvolutionRecord record_from_series(const RunConfig& cfg, const FrameSeries& series) {
    const EvolutionConfig ec = evolution_config(cfg);
    if (series.width() != ec.grid.size())
        fail(ErrorKind::DimensionMismatch, "frames have width " + std::to_string(series.width()) +
                                               " but grid.n_points is " + std::to_string(ec.grid.size()));
    EvolutionRecord record{ec, {}, {}};
    for (std::size_t k = 0; k < series.size(); ++k) record.frames.push_back({series.times[k], series.frames[k]});
    return record;
}

inline TrainConfig train_config(const RunConfig& cfg) {
    TrainConfig tc;
    tc.epochs = cfg.training_epochs;
    tc.rng_seed = cfg.training_rng_seed;
    tc.lr = cfg.training_lr;
    tc.clip = cfg.training_clip;
    return tc;
}

inline PreparedDataset prepare(const RunConfig& cfg, const FrameSeries& series) {
    return prepare_dataset(series.frames, series.times, cfg.dataset_lookback, cfg.dataset_split_fraction);
}

inline PreparedDataset prepare(const RunConfig& cfg, const FrameSeries& series, const Scaler& scaler) {
    return prepare_dataset(series.frames, series.times, cfg.dataset_lookback, cfg.dataset_split_fraction, scaler);
}

inline TrainResult train_surrogate(const RunConfig& cfg, const PreparedDataset& data,
                                   std::function<void(const std::string&)> log = {}) {
    const std::size_t width = data.split.train.targets.front().size();
    TrainConfig tc = train_config(cfg);
    tc.log = std::move(log);
    return train(init_model(width, cfg.training_hidden_dim, cfg.training_rng_seed), data.split, tc);
}

enum class PredictMode { one_step, rollout };

/// Predictions over the test horizon, inverse-transformed but not clamped.
inline FrameSeries predict_test(const SurrogateModel& model, const PreparedDataset& data, PredictMode mode) {
    const WindowedDataset& test = data.split.test;
    if (test.size() == 0) fail(ErrorKind::InvalidArgument, "predict: the split leaves no test windows");
    FrameSeries out;
    out.times = test.target_times;
    if (mode == PredictMode::one_step) {
        for (const auto& window : test.inputs) out.frames.push_back(data.scaler.inverse(predict(model, window)));
    } else {
        out.frames = data.scaler.inverse(predict_rollout(model, test.inputs.front(), test.size()));
    }
    return out;
}

}  // namespace ctqw::pipeline
