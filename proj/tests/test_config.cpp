#include <gtest/gtest.h>

#include "ctqw/config.hpp"

using namespace ctqw;

TEST(run_config, defaults_are_valid) {
    const RunConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.grid_n_points, 200u);
    EXPECT_EQ(cfg.recorded_frames(), 101u);
}

TEST(run_config, parse_with_comments_and_overrides) {
    const RunConfig cfg = parse_config(
        "# reference setup\n"
        "grid.a = -4\n"
        "grid.b=4   # symmetric\n"
        "\n"
        "evolution.normalization=dx_weighted\n"
        "training.rng_seed=7\n");
    EXPECT_EQ(cfg.grid_a, -4.0);
    EXPECT_EQ(cfg.grid_b, 4.0);
    EXPECT_EQ(cfg.evolution_normalization, NormalizationMode::dx_weighted);
    EXPECT_EQ(cfg.training_rng_seed, 7u);
    EXPECT_EQ(cfg.training_epochs, 100u);
}

TEST(run_config, round_trip_is_identity) {
    RunConfig cfg;
    cfg.grid_a = -5.123456789012345;
    cfg.evolution_dt = 0.1 / 3.0;
    cfg.training_lr = 3e-4;
    cfg.training_clip = 1.5;
    cfg.io_output_dir = "runs/a b";
    const RunConfig back = parse_config(serialize_config(cfg));
    EXPECT_EQ(back, cfg);
    EXPECT_EQ(serialize_config(back), serialize_config(cfg));
    EXPECT_EQ(parse_config(serialize_config(RunConfig{})), RunConfig{});
}

TEST(run_config, unknown_and_malformed_keys) {
    EXPECT_THROW(parse_config("grid.c=1\n"), Error);
    EXPECT_THROW(parse_config("grid.a\n"), Error);
    EXPECT_THROW(parse_config("grid.n_points=abc\n"), Error);
    EXPECT_THROW(parse_config("grid.n_points=-3\n"), Error);
    EXPECT_THROW(parse_config("evolution.normalization=l1\n"), Error);
}

TEST(run_config, validation_ranges) {
    auto invalid = [](const char* text) {
        try {
            parse_config(text).validate();
        } catch (const Error& e) {
            return e.kind() == ErrorKind::InvalidArgument;
        }
        return false;
    };
    EXPECT_TRUE(invalid("evolution.n_steps=0"));
    EXPECT_TRUE(invalid("grid.b=-6"));
    EXPECT_TRUE(invalid("grid.n_points=2"));
    EXPECT_TRUE(invalid("evolution.dt=-0.1"));
    EXPECT_TRUE(invalid("dataset.split_fraction=1"));
    EXPECT_TRUE(invalid("dataset.lookback=0"));
    EXPECT_TRUE(invalid("training.epochs=0"));
    EXPECT_TRUE(invalid("training.hidden_dim=0"));
    EXPECT_TRUE(invalid("training.lr=-1"));
    EXPECT_TRUE(invalid("evolution.n_steps=3\ndataset.lookback=4"));
    EXPECT_TRUE(invalid("evolution.n_steps=5\ndataset.lookback=4\ndataset.split_fraction=0.4"));
}
