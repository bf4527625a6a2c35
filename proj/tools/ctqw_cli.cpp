// Command-line front end: simulate -> export-dataset -> train -> predict ->
// compare, plus table and snapshot output. Every command reads the same
// key=value config, overridable by --section.key flags, and composes with the
// others through fixed filenames in io.output_dir.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctqw/ctqw.hpp"

namespace fs = std::filesystem;
using namespace ctqw;

namespace {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalError = 2, kMissingArtifact = 3 };

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Numerical: return kNumericalError;
        case ErrorKind::MissingArtifact: return kMissingArtifact;
        default: return kConfigError;
    }
}

struct ConfigOptions {
    std::string config_path;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value config file");
        for (auto key : RunConfig::keys()) {
            const std::string name(key);
            cmd->add_option("--" + name, overrides[name], "override " + name);
        }
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) fail(ErrorKind::InvalidArgument, "cannot read config file '" + config_path + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            cfg = parse_config(ss.str());
        }
        for (const auto& [key, value] : overrides)
            if (!value.empty()) cfg.set(key, value);
        cfg.validate();
        return cfg;
    }
};

std::string path_in(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.io_output_dir) / name).string();
}

void ensure_output_dir(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.io_output_dir, ec);
    if (ec) fail(ErrorKind::MissingArtifact, "cannot create output directory '" + cfg.io_output_dir + "'");
}

FrameSeries load_frames(const RunConfig& cfg) {
    auto in = text::open_input(path_in(cfg, "frames.csv"), "simulate");
    FrameSeries s = read_frames_csv(in);
    if (s.width() != cfg.grid_n_points)
        fail(ErrorKind::DimensionMismatch, "frames.csv has width " + std::to_string(s.width()) +
                                               " but grid.n_points is " + std::to_string(cfg.grid_n_points));
    return s;
}

Scaler load_scaler(const RunConfig& cfg) {
    auto in = text::open_input(path_in(cfg, "scaler.txt"), "train");
    return read_scaler(in);
}

SurrogateModel load_model(const RunConfig& cfg) {
    auto in = text::open_input(path_in(cfg, "model.ckpt"), "train");
    SurrogateModel model = read_checkpoint(in);
    if (model.input_dim != cfg.grid_n_points)
        fail(ErrorKind::DimensionMismatch, "model.ckpt expects " + std::to_string(model.input_dim) +
                                               " grid points, config has " + std::to_string(cfg.grid_n_points));
    return model;
}

std::string prediction_file(pipeline::PredictMode mode) {
    return mode == pipeline::PredictMode::one_step ? "pred_onestep.csv" : "pred_rollout.csv";
}

pipeline::PredictMode parse_mode(const std::string& s) {
    if (s == "one-step") return pipeline::PredictMode::one_step;
    if (s == "rollout") return pipeline::PredictMode::rollout;
    fail(ErrorKind::InvalidArgument, "--mode must be one-step or rollout, got '" + s + "'");
}

std::vector<double> parse_real_list(const std::string& s, std::string_view what) {
    std::vector<double> out;
    for (auto cell : text::split(s, ','))
        if (!text::trim(cell).empty()) out.push_back(text::parse_double(text::trim(cell), what));
    if (out.empty()) fail(ErrorKind::InvalidArgument, std::string(what) + ": empty list");
    return out;
}

std::vector<std::size_t> parse_index_list(const std::string& s) {
    std::vector<std::size_t> out;
    for (auto cell : text::split(s, ',')) {
        if (text::trim(cell).empty()) continue;
        const long long v = text::parse_integer(text::trim(cell), "--indices");
        if (v < 0) fail(ErrorKind::InvalidArgument, "--indices: negative index " + std::to_string(v));
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) fail(ErrorKind::InvalidArgument, "--indices: empty list");
    return out;
}

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename Fn>
void write_file(const std::string& path, Fn&& fn) {
    auto out = text::open_output(path);
    fn(out);
    if (!out) fail(ErrorKind::MissingArtifact, "failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------

void cmd_simulate(const RunConfig& cfg, bool dump_spectrum) {
    ensure_output_dir(cfg);
    const EvolutionConfig ec = pipeline::evolution_config(cfg);
    const HamiltonianMatrix h = harmonic_hamiltonian(ec.grid);
    const SpectralDecomposition spec = eigendecompose(h);
    const EvolutionRecord record = run_evolution(ec, spec, gaussian_initial(ec.grid, ec.normalization));

    write_file(path_in(cfg, "frames.csv"), [&](std::ostream& os) { write_frames_csv(os, to_series(record.frames)); });
    write_file(path_in(cfg, "conservation.csv"), [&](std::ostream& os) { write_conservation_csv(os, record); });
    if (dump_spectrum)
        write_file(path_in(cfg, "spectrum.csv"), [&](std::ostream& os) { write_spectrum_csv(os, spec); });
    std::cout << "simulate: " << record.frames.size() << " frames, max drift "
              << text::format_double(record.max_drift()) << '\n';
}

void cmd_table(const RunConfig& cfg, const std::string& times, const std::string& indices) {
    const auto time_list = parse_real_list(times, "--times");
    const auto index_list = parse_index_list(indices);
    ensure_output_dir(cfg);
    const std::string frames_path = path_in(cfg, "frames.csv");
    const EvolutionRecord record =
        fs::exists(frames_path) ? pipeline::record_from_series(cfg, load_frames(cfg)) : pipeline::simulate(cfg);
    const std::string table = format_table(table_slice(record, time_list, index_list));
    std::cout << table;
    write_file(path_in(cfg, "table.txt"), [&](std::ostream& os) { os << table; });
}

void cmd_export_dataset(const RunConfig& cfg) {
    const FrameSeries series = load_frames(cfg);
    const PreparedDataset data = pipeline::prepare(cfg, series);
    FrameSeries scaled{series.times, data.scaler.transform(series.frames)};
    write_file(path_in(cfg, "frames_scaled.csv"), [&](std::ostream& os) { write_frames_csv(os, scaled); });
    write_file(path_in(cfg, "scaler.txt"), [&](std::ostream& os) { write_scaler(os, data.scaler); });
    std::cout << "export-dataset: " << data.split.train.size() << " train / " << data.split.test.size()
              << " test windows, min=" << text::format_double(data.scaler.min())
              << " max=" << text::format_double(data.scaler.max()) << '\n';
}

void cmd_train(const RunConfig& cfg) {
    const FrameSeries series = load_frames(cfg);
    const PreparedDataset data = pipeline::prepare(cfg, series);
    const TrainResult result =
        pipeline::train_surrogate(cfg, data, [](const std::string& msg) { std::cerr << "train: " << msg << '\n'; });
    write_file(path_in(cfg, "model.ckpt"), [&](std::ostream& os) { write_checkpoint(os, result.model); });
    write_file(path_in(cfg, "loss.csv"), [&](std::ostream& os) { write_loss_csv(os, result.history); });
    write_file(path_in(cfg, "scaler.txt"), [&](std::ostream& os) { write_scaler(os, data.scaler); });
    std::cout << "train: epoch 1 mse " << text::format_double(result.history.train_mse.front()) << ", epoch "
              << result.history.epochs() << " mse " << text::format_double(result.history.train_mse.back())
              << " (scaled units)\n";
}

void cmd_predict(const RunConfig& cfg, const std::string& mode_name) {
    const auto mode = parse_mode(mode_name);
    const FrameSeries series = load_frames(cfg);
    const SurrogateModel model = load_model(cfg);
    const PreparedDataset data = pipeline::prepare(cfg, series, load_scaler(cfg));
    const FrameSeries predictions = pipeline::predict_test(model, data, mode);
    write_file(path_in(cfg, prediction_file(mode)), [&](std::ostream& os) { write_frames_csv(os, predictions); });
    std::cout << "predict: " << predictions.size() << " frames (" << mode_name << ", physical units)\n";
}

FrameSeries load_predictions(const RunConfig& cfg, pipeline::PredictMode mode) {
    const std::string flag = mode == pipeline::PredictMode::one_step ? "one-step" : "rollout";
    auto in = text::open_input(path_in(cfg, prediction_file(mode)), "predict --mode " + flag);
    return read_frames_csv(in);
}

void cmd_compare(const RunConfig& cfg) {
    const FrameSeries truth = load_frames(cfg);
    const Grid grid = pipeline::grid(cfg);

    auto emit = [&](pipeline::PredictMode mode, const std::string& file, const std::string& label) {
        const ComparisonReport report = build_report(truth, load_predictions(cfg, mode), grid);
        write_file(path_in(cfg, file), [&](std::ostream& os) { write_report_csv(os, report); });
        std::cout << "compare[" << label << "]: frames=" << report.frames.size()
                  << " mean_mse=" << text::format_double(report.mean.mse)
                  << " mean_mae=" << text::format_double(report.mean.mae)
                  << " mean_max_abs_err=" << text::format_double(report.mean.max_abs_err)
                  << " mean_peak_position_err=" << text::format_double(report.mean.peak_position_err)
                  << " clamped=" << report.clamped_count << " (physical units)\n";
    };
    emit(pipeline::PredictMode::one_step, "report.csv", "one-step");
    if (fs::exists(path_in(cfg, prediction_file(pipeline::PredictMode::rollout))))
        emit(pipeline::PredictMode::rollout, "report_rollout.csv", "rollout");
}

void cmd_snapshot(const RunConfig& cfg, const std::string& times, const std::string& mode_name) {
    const auto time_list = parse_real_list(times, "--times");
    const auto mode = parse_mode(mode_name);
    const FrameSeries truth = load_frames(cfg);
    const FrameSeries pred = load_predictions(cfg, mode);
    const Grid grid = pipeline::grid(cfg);
    const double tolerance = 0.5 * cfg.evolution_dt * static_cast<double>(cfg.evolution_stride);

    auto locate = [&](const FrameSeries& s, double t, const char* what) {
        for (std::size_t k = 0; k < s.size(); ++k)
            if (std::abs(s.times[k] - t) <= tolerance) return k;
        fail(ErrorKind::InvalidArgument, std::string("snapshot: no ") + what + " frame at t=" + shortest(t));
    };
    for (double t : time_list) {
        const std::size_t ki = locate(truth, t, "simulated");
        const std::size_t kp = locate(pred, t, "predicted");
        const std::string file = "snapshot_" + shortest(t) + ".csv";
        write_file(path_in(cfg, file),
                   [&](std::ostream& os) { write_snapshot_csv(os, grid, truth.frames[ki], pred.frames[kp]); });
        std::cout << "snapshot: wrote " << file << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-walk simulation of the 1D harmonic oscillator with an LSTM surrogate"};
    app.require_subcommand(1);

    ConfigOptions simulate_opts, table_opts, export_opts, train_opts, predict_opts, compare_opts, snapshot_opts;
    bool dump_spectrum = false;
    std::string table_times = "0,0.5,1", table_indices = "0,1,2,3,4";
    std::string predict_mode = "one-step";
    std::string snapshot_times, snapshot_mode = "one-step";

    auto* simulate = app.add_subcommand("simulate", "run the quantum-walk evolution; writes frames.csv, conservation.csv");
    simulate_opts.attach(simulate);
    simulate->add_flag("--dump-spectrum", dump_spectrum, "also write spectrum.csv (eigenvalues and eigenvectors)");

    auto* table = app.add_subcommand("table", "tabulate densities at selected nodes and times; writes table.txt");
    table_opts.attach(table);
    table->add_option("--times", table_times, "comma-separated times");
    table->add_option("--indices", table_indices, "comma-separated node indices");

    auto* export_ds = app.add_subcommand("export-dataset", "write min-max scaled frames and scaler.txt");
    export_opts.attach(export_ds);

    auto* train_cmd = app.add_subcommand("train", "train the LSTM surrogate; writes model.ckpt, loss.csv, scaler.txt");
    train_opts.attach(train_cmd);

    auto* predict_cmd = app.add_subcommand("predict", "predict the test horizon; writes pred_onestep.csv or pred_rollout.csv");
    predict_opts.attach(predict_cmd);
    predict_cmd->add_option("--mode", predict_mode, "one-step or rollout");

    auto* compare_cmd = app.add_subcommand("compare", "score predictions against the simulation; writes report.csv");
    compare_opts.attach(compare_cmd);

    auto* snapshot = app.add_subcommand("snapshot", "write snapshot_<t>.csv plot data");
    snapshot_opts.attach(snapshot);
    snapshot->add_option("--times", snapshot_times, "comma-separated times")->required();
    snapshot->add_option("--mode", snapshot_mode, "one-step or rollout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*simulate) cmd_simulate(simulate_opts.resolve(), dump_spectrum);
        else if (*table) cmd_table(table_opts.resolve(), table_times, table_indices);
        else if (*export_ds) cmd_export_dataset(export_opts.resolve());
        else if (*train_cmd) cmd_train(train_opts.resolve());
        else if (*predict_cmd) cmd_predict(predict_opts.resolve(), predict_mode);
        else if (*compare_cmd) cmd_compare(compare_opts.resolve());
        else if (*snapshot) cmd_snapshot(snapshot_opts.resolve(), snapshot_times, snapshot_mode);
    } catch (const Error& e) {
        std::cerr << "error kind=" << to_string(e.kind()) << " message=\"" << e.what() << "\"\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error kind=internal message=\"" << e.what() << "\"\n";
        return kNumericalError;
    }
    return kOk;
}
