#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ctqw/dataset.hpp"

using namespace ctqw;

namespace {

Frames numbered_frames(std::size_t count, std::size_t width = 2) {
    Frames f;
    for (std::size_t k = 0; k < count; ++k) f.push_back(Frame(width, static_cast<double>(k)));
    return f;
}

}  // namespace

TEST(scaler, fit_global_extrema) {
    const Scaler s = fit_scaler({{0, 2}, {1, 4}});
    EXPECT_EQ(s.min(), 0.0);
    EXPECT_EQ(s.max(), 4.0);
    EXPECT_EQ(s.transform(0.0), 0.0);
    EXPECT_EQ(s.transform(4.0), 1.0);
    EXPECT_EQ(s.transform(8.0), 2.0);  // no clamping
}

TEST(scaler, constant_data_maps_to_zero) {
    const Scaler s = fit_scaler({{3, 3}, {3, 3}});
    EXPECT_EQ(s.transform(3.0), 0.0);
    EXPECT_EQ(s.transform(10.0), 0.0);
    EXPECT_EQ(s.inverse(0.0), 3.0);
}

TEST(scaler, empty_and_unfitted_errors) {
    EXPECT_THROW(fit_scaler({}), Error);
    EXPECT_THROW(fit_scaler({{}, {}}), Error);
    const Scaler unfitted;
    EXPECT_FALSE(unfitted.fitted());
    EXPECT_THROW(unfitted.transform(1.0), Error);
    EXPECT_THROW(unfitted.inverse(1.0), Error);
}

TEST(scaler, round_trip_property) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mag(-30, 2);
    for (int trial = 0; trial < 50; ++trial) {
        Frames frames(4, Frame(16));
        for (auto& f : frames)
            for (double& v : f) v = std::pow(10.0, mag(rng));
        const Scaler s = fit_scaler(frames);
        const Frames back = s.inverse(s.transform(frames));
        for (std::size_t k = 0; k < frames.size(); ++k)
            for (std::size_t i = 0; i < frames[k].size(); ++i) {
                const double v = frames[k][i];
                EXPECT_LE(std::abs(back[k][i] - v), 1e-12 * std::max(std::abs(v), s.range()));
            }
        for (const auto& f : s.transform(frames))
            for (double v : f) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
    }
}

TEST(scaler, sidecar_round_trip_is_bit_exact) {
    const Scaler s(4.5801067452910755e-24, 0.04004411014801283);
    std::stringstream ss;
    write_scaler(ss, s);
    EXPECT_EQ(ss.str().substr(0, 4), "min=");
    const Scaler back = read_scaler(ss);
    EXPECT_EQ(back.min(), s.min());
    EXPECT_EQ(back.max(), s.max());
}

TEST(scaler, sidecar_missing_key) {
    std::stringstream ss("min=1\n");
    EXPECT_THROW(read_scaler(ss), Error);
}

TEST(windowize, enumerates_pairs) {
    const WindowedDataset ds = windowize(numbered_frames(5), 2);
    ASSERT_EQ(ds.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(ds.inputs[k][0][0], static_cast<double>(k));
        EXPECT_EQ(ds.inputs[k][1][0], static_cast<double>(k + 1));
        EXPECT_EQ(ds.targets[k][0], static_cast<double>(k + 2));
        EXPECT_EQ(ds.start_index[k], k);
    }
}

TEST(windowize, boundary_and_default_sizes) {
    EXPECT_EQ(windowize(numbered_frames(4), 3).size(), 1u);
    EXPECT_EQ(windowize(numbered_frames(101), 4).size(), 97u);
    EXPECT_THROW(windowize(numbered_frames(3), 3), Error);
    EXPECT_THROW(windowize(numbered_frames(3), 0), Error);
}

TEST(windowize, copies_values_exactly) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u;
    Frames frames(12, Frame(7));
    for (auto& f : frames)
        for (double& v : f) v = u(rng);
    const WindowedDataset ds = windowize(frames, 3);
    for (std::size_t k = 0; k < ds.size(); ++k) {
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(ds.inputs[k][j], frames[k + j]);
        EXPECT_EQ(ds.targets[k], frames[k + 3]);
    }
}

TEST(split, floor_arithmetic) {
    const auto ten = split(windowize(numbered_frames(12), 2), 0.8);
    EXPECT_EQ(ten.train.size(), 8u);
    EXPECT_EQ(ten.test.size(), 2u);
    const auto default_run = split(windowize(numbered_frames(101), 4), 0.8);
    EXPECT_EQ(default_run.train.size(), 77u);
    EXPECT_EQ(default_run.test.size(), 20u);
}

TEST(split, chronological_and_order_preserving) {
    const WindowedDataset ds = windowize(numbered_frames(30), 3);
    const SplitDataset s = split(ds, 0.6);
    const std::size_t train_end = s.train.start_index.back() + s.train.lookback;  // target index of last train window
    EXPECT_LT(s.train.start_index.back(), s.test.start_index.front());
    EXPECT_LE(train_end, s.test.start_index.front() + s.test.lookback);
    Frames targets = s.train.targets;
    targets.insert(targets.end(), s.test.targets.begin(), s.test.targets.end());
    EXPECT_EQ(targets, ds.targets);
}

TEST(split, fraction_out_of_range) {
    const WindowedDataset ds = windowize(numbered_frames(10), 2);
    EXPECT_THROW(split(ds, 0.0), Error);
    EXPECT_THROW(split(ds, 1.0), Error);
    EXPECT_THROW(split(ds, -0.5), Error);
}

TEST(prepare_dataset, scaler_fit_on_training_frames_only) {
    // values rise with time, so the test frames exceed the training range
    Frames frames = numbered_frames(15, 3);
    std::vector<double> times;
    for (std::size_t k = 0; k < frames.size(); ++k) times.push_back(0.1 * static_cast<double>(k));
    const PreparedDataset p = prepare_dataset(frames, times, 2, 0.5);
    // M = 13 windows, 6 train, training frames are 0..7
    EXPECT_EQ(p.split.train.size(), 6u);
    EXPECT_EQ(p.scaler.min(), 0.0);
    EXPECT_EQ(p.scaler.max(), 7.0);
    EXPECT_GT(p.split.test.targets.back()[0], 1.0);
    EXPECT_DOUBLE_EQ(p.split.test.target_times.front(), 0.8);
}
