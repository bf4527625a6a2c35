#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ctqw/csv.hpp"
#include "ctqw/dataset.hpp"
#include "ctqw/error.hpp"
#include "ctqw/matrix.hpp"

// Single-layer LSTM with a linear dense head, trained by BPTT and Adam to
// map a look-back window of density frames to the next frame.
namespace ctqw {

inline constexpr std::size_t kGateCount = 4;
enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kCellGate = 2, kOutputGate = 3 };
inline constexpr std::array<const char*, kGateCount> kGateNames = {"input", "forget", "cell", "output"};

/// Every trainable tensor. Gradients and Adam moments reuse the same layout.
struct SurrogateParams {
    std::array<Matrix<double>, kGateCount> w;       // hidden x input
    std::array<Matrix<double>, kGateCount> u;       // hidden x hidden
    std::array<std::vector<double>, kGateCount> b;  // hidden
    Matrix<double> head_w;                          // input x hidden
    std::vector<double> head_b;                     // input

    static SurrogateParams zeros(std::size_t input_dim, std::size_t hidden_dim) {
        SurrogateParams p;
        for (std::size_t g = 0; g < kGateCount; ++g) {
            p.w[g] = Matrix<double>(hidden_dim, input_dim);
            p.u[g] = Matrix<double>(hidden_dim, hidden_dim);
            p.b[g].assign(hidden_dim, 0.0);
        }
        p.head_w = Matrix<double>(input_dim, hidden_dim);
        p.head_b.assign(input_dim, 0.0);
        return p;
    }

    template <typename Value>
    struct Tensor {
        std::string name;
        std::size_t rows;
        std::size_t cols;
        std::span<Value> values;
    };
    using TensorRef = Tensor<double>;
    using TensorView = Tensor<const double>;

    // Canonical order: per gate (w, u, b), then head.w, head.b.
    std::vector<TensorRef> tensors() { return collect<double>(*this); }
    std::vector<TensorView> tensors() const { return collect<const double>(*this); }

    std::vector<std::span<const double>> values() const {
        std::vector<std::span<const double>> out;
        for (const auto& t : tensors()) out.push_back(t.values);
        return out;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (auto v : values()) n += v.size();
        return n;
    }

    bool operator==(const SurrogateParams&) const = default;

private:
    template <typename Value, typename Self>
    static std::vector<Tensor<Value>> collect(Self& self) {
        std::vector<Tensor<Value>> out;
        for (std::size_t g = 0; g < kGateCount; ++g) {
            const std::string gate = kGateNames[g];
            out.push_back({"lstm.w_" + gate, self.w[g].rows(), self.w[g].cols(), self.w[g].flat()});
            out.push_back({"lstm.u_" + gate, self.u[g].rows(), self.u[g].cols(), self.u[g].flat()});
            out.push_back({"lstm.b_" + gate, 1, self.b[g].size(), self.b[g]});
        }
        out.push_back({"head.w", self.head_w.rows(), self.head_w.cols(), self.head_w.flat()});
        out.push_back({"head.b", 1, self.head_b.size(), self.head_b});
        return out;
    }
};

struct SurrogateModel {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    std::uint64_t seed = 0;
    SurrogateParams params;
    std::uint64_t version = 0;  // bumped on every optimizer update

    bool all_finite() const {
        for (auto v : params.values())
            for (double x : v)
                if (!std::isfinite(x)) return false;
        return true;
    }
};

inline double init_bound(std::size_t hidden_dim) { return 1.0 / std::sqrt(static_cast<double>(hidden_dim)); }

/// Weights ~ U[-1/sqrt(hidden), 1/sqrt(hidden)]; biases 0 except forget = 1.
inline SurrogateModel init_model(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed) {
    if (input_dim < 1 || hidden_dim < 1)
        fail(ErrorKind::InvalidArgument, "init_model: dimensions must be at least 1");
    SurrogateModel model{input_dim, hidden_dim, seed, SurrogateParams::zeros(input_dim, hidden_dim), 0};
    std::mt19937_64 rng(seed);
    const double bound = init_bound(hidden_dim);
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto fill = [&](std::span<double> s) {
        for (double& x : s) x = dist(rng);
    };
    for (std::size_t g = 0; g < kGateCount; ++g) {
        fill(model.params.w[g].flat());
        fill(model.params.u[g].flat());
    }
    fill(model.params.head_w.flat());
    model.params.b[kForgetGate].assign(hidden_dim, 1.0);
    return model;
}

/// Activations cached by `forward` for reverse-mode differentiation.
struct ForwardTape {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    std::uint64_t model_version = 0;
    Frames inputs;                                               // x_1..x_L
    std::vector<std::array<std::vector<double>, kGateCount>> gates;  // activated i, f, g, o per step
    Frames cell;       // c_0..c_L
    Frames cell_tanh;  // tanh(c_0)..tanh(c_L)
    Frames hidden;     // h_0..h_L
    std::vector<double> prediction;

    std::size_t steps() const { return inputs.size(); }
};

struct ForwardPass {
    std::vector<double> prediction;
    ForwardTape tape;
};

namespace detail {
inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace detail

inline ForwardPass forward(const SurrogateModel& model, const Frames& window) {
    const std::size_t n = model.input_dim;
    const std::size_t hd = model.hidden_dim;
    if (window.empty()) fail(ErrorKind::InvalidArgument, "forward: window must hold at least one frame");
    for (const auto& x : window)
        if (x.size() != n)
            fail(ErrorKind::DimensionMismatch, "forward: frame width " + std::to_string(x.size()) +
                                                   " does not match model input " + std::to_string(n));
    const SurrogateParams& p = model.params;

    ForwardPass out;
    ForwardTape& tape = out.tape;
    tape.input_dim = n;
    tape.hidden_dim = hd;
    tape.model_version = model.version;
    tape.inputs = window;
    tape.cell.assign(1, std::vector<double>(hd, 0.0));
    tape.cell_tanh.assign(1, std::vector<double>(hd, 0.0));
    tape.hidden.assign(1, std::vector<double>(hd, 0.0));

    for (const auto& x : window) {
        const auto& h_prev = tape.hidden.back();
        const auto& c_prev = tape.cell.back();
        std::array<std::vector<double>, kGateCount> act;
        for (std::size_t g = 0; g < kGateCount; ++g) {
            act[g].resize(hd);
            for (std::size_t r = 0; r < hd; ++r) {
                double z = p.b[g][r];
                auto wr = p.w[g].row(r);
                for (std::size_t j = 0; j < n; ++j) z += wr[j] * x[j];
                auto ur = p.u[g].row(r);
                for (std::size_t j = 0; j < hd; ++j) z += ur[j] * h_prev[j];
                act[g][r] = g == kCellGate ? std::tanh(z) : detail::sigmoid(z);
            }
        }
        std::vector<double> c(hd), tc(hd), h(hd);
        for (std::size_t r = 0; r < hd; ++r) {
            c[r] = act[kForgetGate][r] * c_prev[r] + act[kInputGate][r] * act[kCellGate][r];
            tc[r] = std::tanh(c[r]);
            h[r] = act[kOutputGate][r] * tc[r];
        }
        tape.gates.push_back(std::move(act));
        tape.cell.push_back(std::move(c));
        tape.cell_tanh.push_back(std::move(tc));
        tape.hidden.push_back(std::move(h));
    }

    const auto& h_last = tape.hidden.back();
    out.prediction.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        double y = p.head_b[r];
        auto wr = p.head_w.row(r);
        for (std::size_t j = 0; j < hd; ++j) y += wr[j] * h_last[j];
        if (!std::isfinite(y))
            fail(ErrorKind::Numerical, "forward: non-finite activation at output " + std::to_string(r));
        out.prediction[r] = y;
    }
    tape.prediction = out.prediction;
    return out;
}

inline std::vector<double> predict(const SurrogateModel& model, const Frames& window) {
    return forward(model, window).prediction;
}

inline double mse(std::span<const double> prediction, std::span<const double> target) {
    if (prediction.size() != target.size() || prediction.empty())
        fail(ErrorKind::DimensionMismatch, "mse: prediction and target lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double d = prediction[i] - target[i];
        s += d * d;
    }
    return s / static_cast<double>(prediction.size());
}

/// Exact gradient of mse(prediction, target) w.r.t. every parameter (BPTT).
inline SurrogateParams backward(const SurrogateModel& model, const ForwardTape& tape, std::span<const double> target) {
    const std::size_t n = model.input_dim;
    const std::size_t hd = model.hidden_dim;
    if (tape.input_dim != n || tape.hidden_dim != hd || tape.steps() == 0 || tape.hidden.size() != tape.steps() + 1)
        fail(ErrorKind::InvalidArgument, "backward: tape does not match this model");
    if (tape.model_version != model.version)
        fail(ErrorKind::InvalidArgument, "backward: stale tape (model was updated after the forward pass)");
    if (target.size() != n) fail(ErrorKind::DimensionMismatch, "backward: target width mismatch");

    const SurrogateParams& p = model.params;
    SurrogateParams grad = SurrogateParams::zeros(n, hd);

    std::vector<double> dy(n);
    for (std::size_t r = 0; r < n; ++r) dy[r] = 2.0 * (tape.prediction[r] - target[r]) / static_cast<double>(n);

    const auto& h_last = tape.hidden.back();
    std::vector<double> dh(hd, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        grad.head_b[r] = dy[r];
        auto gw = grad.head_w.row(r);
        auto wr = p.head_w.row(r);
        for (std::size_t j = 0; j < hd; ++j) {
            gw[j] = dy[r] * h_last[j];
            dh[j] += wr[j] * dy[r];
        }
    }

    std::vector<double> dc(hd, 0.0);
    std::array<std::vector<double>, kGateCount> dz;
    for (auto& v : dz) v.resize(hd);
    for (std::size_t t = tape.steps(); t-- > 0;) {
        const auto& act = tape.gates[t];
        const auto& x = tape.inputs[t];
        const auto& h_prev = tape.hidden[t];
        const auto& c_prev = tape.cell[t];
        const auto& tc = tape.cell_tanh[t + 1];
        for (std::size_t r = 0; r < hd; ++r) {
            const double i = act[kInputGate][r];
            const double f = act[kForgetGate][r];
            const double g = act[kCellGate][r];
            const double o = act[kOutputGate][r];
            dc[r] += dh[r] * o * (1.0 - tc[r] * tc[r]);
            dz[kOutputGate][r] = dh[r] * tc[r] * o * (1.0 - o);
            dz[kInputGate][r] = dc[r] * g * i * (1.0 - i);
            dz[kCellGate][r] = dc[r] * i * (1.0 - g * g);
            dz[kForgetGate][r] = dc[r] * c_prev[r] * f * (1.0 - f);
            dc[r] *= f;
        }
        std::fill(dh.begin(), dh.end(), 0.0);
        for (std::size_t g = 0; g < kGateCount; ++g) {
            for (std::size_t r = 0; r < hd; ++r) {
                const double d = dz[g][r];
                grad.b[g][r] += d;
                auto gw = grad.w[g].row(r);
                for (std::size_t j = 0; j < n; ++j) gw[j] += d * x[j];
                auto gu = grad.u[g].row(r);
                auto ur = p.u[g].row(r);
                for (std::size_t j = 0; j < hd; ++j) {
                    gu[j] += d * h_prev[j];
                    dh[j] += ur[j] * d;
                }
            }
        }
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Adam

struct OptimizerState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    SurrogateParams m;
    SurrogateParams v;

    static OptimizerState fresh(const SurrogateModel& model, double lr = 1e-3) {
        OptimizerState s;
        s.lr = lr;
        s.m = SurrogateParams::zeros(model.input_dim, model.hidden_dim);
        s.v = SurrogateParams::zeros(model.input_dim, model.hidden_dim);
        return s;
    }
};

inline void adam_step(OptimizerState& state, SurrogateModel& model, SurrogateParams& grads) {
    auto params = model.params.tensors();
    auto g = grads.tensors();
    auto m = state.m.tensors();
    auto v = state.v.tensors();
    if (g.size() != params.size() || m.size() != params.size() || v.size() != params.size())
        fail(ErrorKind::DimensionMismatch, "adam_step: tensor count mismatch");
    for (std::size_t t = 0; t < params.size(); ++t) {
        if (g[t].values.size() != params[t].values.size() || m[t].values.size() != params[t].values.size() ||
            v[t].values.size() != params[t].values.size())
            fail(ErrorKind::DimensionMismatch, "adam_step: shape mismatch in " + params[t].name);
        for (double x : g[t].values)
            if (!std::isfinite(x)) fail(ErrorKind::Numerical, "adam_step: non-finite gradient in " + g[t].name);
    }

    ++state.step;
    const double k = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, k);
    const double c2 = 1.0 - std::pow(state.beta2, k);
    for (std::size_t t = 0; t < params.size(); ++t) {
        auto theta = params[t].values;
        auto gt = g[t].values;
        auto mt = m[t].values;
        auto vt = v[t].values;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            mt[i] = state.beta1 * mt[i] + (1.0 - state.beta1) * gt[i];
            vt[i] = state.beta2 * vt[i] + (1.0 - state.beta2) * gt[i] * gt[i];
            const double m_hat = mt[i] / c1;
            const double v_hat = vt[i] / c2;
            theta[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
    ++model.version;
}

/// Rescales `grads` to global L2 norm `max_norm` if larger; true when it fired.
inline bool clip_gradients(SurrogateParams& grads, double max_norm) {
    double sq = 0.0;
    for (auto v : grads.values())
        for (double x : v) sq += x * x;
    const double norm = std::sqrt(sq);
    if (!(norm > max_norm)) return false;
    const double s = max_norm / norm;
    for (auto& t : grads.tensors())
        for (double& x : t.values) x *= s;
    return true;
}

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 1;
    std::uint64_t rng_seed = 42;
    double lr = 1e-3;
    double clip = 0.0;  // global gradient-norm clip; 0 disables
    bool evaluate_test = false;
    std::function<void(const std::string&)> log;

    void validate() const {
        if (epochs < 1) fail(ErrorKind::InvalidArgument, "train: epochs must be at least 1");
        if (batch_size != 1) fail(ErrorKind::InvalidArgument, "train: only batch size 1 is supported");
        if (!std::isfinite(lr) || lr < 0.0) fail(ErrorKind::InvalidArgument, "train: lr must be finite and >= 0");
        if (!std::isfinite(clip) || clip < 0.0) fail(ErrorKind::InvalidArgument, "train: clip must be >= 0");
    }
};

struct LossHistory {
    std::vector<double> train_mse;  // scaled units, mean over the epoch's updates
    std::vector<double> test_mse;   // empty unless evaluate_test

    std::size_t epochs() const { return train_mse.size(); }
};

struct TrainResult {
    SurrogateModel model;
    LossHistory history;
};

inline double evaluate(const SurrogateModel& model, const WindowedDataset& ds) {
    if (ds.size() == 0) return 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < ds.size(); ++k) total += mse(predict(model, ds.inputs[k]), ds.targets[k]);
    return total / static_cast<double>(ds.size());
}

/// Batch size 1, chronological order, one Adam update per training window.
inline TrainResult train(SurrogateModel model, const SplitDataset& data, const TrainConfig& cfg) {
    cfg.validate();
    const WindowedDataset& tr = data.train;
    if (tr.size() == 0) fail(ErrorKind::InvalidArgument, "train: empty training set");

    OptimizerState opt = OptimizerState::fresh(model, cfg.lr);
    LossHistory history;
    std::size_t clip_events = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double total = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const ForwardPass pass = forward(model, tr.inputs[k]);
            const double loss = mse(pass.prediction, tr.targets[k]);
            if (!std::isfinite(loss))
                fail(ErrorKind::Numerical, "train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                               ", pair " + std::to_string(k));
            total += loss;
            SurrogateParams grads = backward(model, pass.tape, tr.targets[k]);
            if (cfg.clip > 0.0 && clip_gradients(grads, cfg.clip)) {
                ++clip_events;
                if (cfg.log)
                    cfg.log("gradient clip fired at epoch " + std::to_string(epoch + 1) + ", pair " +
                            std::to_string(k));
            }
            adam_step(opt, model, grads);
        }
        history.train_mse.push_back(total / static_cast<double>(tr.size()));
        if (cfg.evaluate_test) history.test_mse.push_back(evaluate(model, data.test));
    }
    if (clip_events > 0 && cfg.log) cfg.log("gradient clipping fired " + std::to_string(clip_events) + " times");
    return {std::move(model), std::move(history)};
}

/// Autoregressive prediction in scaled units; the window slides by one per step.
inline Frames predict_rollout(const SurrogateModel& model, const Frames& seed_window, std::size_t n_steps) {
    if (n_steps < 1) fail(ErrorKind::InvalidArgument, "predict_rollout: n_steps must be at least 1");
    Frames window = seed_window;
    Frames out;
    out.reserve(n_steps);
    for (std::size_t s = 0; s < n_steps; ++s) {
        out.push_back(predict(model, window));
        window.erase(window.begin());
        window.push_back(out.back());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoint: `key=value` header, then `[name] rows=R cols=C` sections with
// one comma-separated row per line.

inline void write_checkpoint(std::ostream& os, const SurrogateModel& model) {
    os << "input_dim=" << model.input_dim << "\nhidden_dim=" << model.hidden_dim << "\nseed=" << model.seed << '\n';
    for (const auto& t : model.params.tensors()) {
        os << '[' << t.name << "] rows=" << t.rows << " cols=" << t.cols << '\n';
        for (std::size_t r = 0; r < t.rows; ++r) {
            for (std::size_t c = 0; c < t.cols; ++c) {
                if (c) os << ',';
                os << text::format_double(t.values[r * t.cols + c]);
            }
            os << '\n';
        }
    }
}

inline SurrogateModel read_checkpoint(std::istream& is) {
    std::map<std::string, std::string> header;
    std::string line;
    std::optional<std::string> pending;
    while (std::getline(is, line)) {
        const auto t = text::trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            pending = std::string(t);
            break;
        }
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) fail(ErrorKind::Format, "checkpoint: bad header line '" + line + "'");
        header[std::string(t.substr(0, eq))] = std::string(t.substr(eq + 1));
    }
    for (const char* key : {"input_dim", "hidden_dim", "seed"})
        if (!header.count(key)) fail(ErrorKind::Format, std::string("checkpoint: missing header ") + key);

    const auto input_dim = text::parse_integer(header["input_dim"], "checkpoint");
    const auto hidden_dim = text::parse_integer(header["hidden_dim"], "checkpoint");
    if (input_dim < 1 || hidden_dim < 1) fail(ErrorKind::Format, "checkpoint: dimensions must be positive");
    SurrogateModel model{static_cast<std::size_t>(input_dim), static_cast<std::size_t>(hidden_dim),
                         std::stoull(header["seed"]),
                         SurrogateParams::zeros(static_cast<std::size_t>(input_dim),
                                                static_cast<std::size_t>(hidden_dim)),
                         0};

    for (auto& tensor : model.params.tensors()) {
        const std::string expected = "[" + tensor.name + "] rows=" + std::to_string(tensor.rows) +
                                     " cols=" + std::to_string(tensor.cols);
        if (!pending || *pending != expected)
            fail(ErrorKind::Format, "checkpoint: expected section '" + expected + "', found '" +
                                        pending.value_or("<eof>") + "'");
        for (std::size_t r = 0; r < tensor.rows; ++r) {
            if (!std::getline(is, line)) fail(ErrorKind::Format, "checkpoint: truncated section " + tensor.name);
            const auto cells = text::split(text::trim(line), ',');
            if (cells.size() != tensor.cols)
                fail(ErrorKind::Format, "checkpoint: wrong row width in " + tensor.name);
            for (std::size_t c = 0; c < tensor.cols; ++c)
                tensor.values[r * tensor.cols + c] = text::parse_double(cells[c], "checkpoint");
        }
        pending.reset();
        while (std::getline(is, line)) {
            const auto t = text::trim(line);
            if (t.empty()) continue;
            pending = std::string(t);
            break;
        }
    }
    if (pending) fail(ErrorKind::Format, "checkpoint: unexpected trailing content '" + *pending + "'");
    return model;
}

inline void write_loss_csv(std::ostream& os, const LossHistory& h) {
    const bool with_test = !h.test_mse.empty();
    os << "epoch,train_mse" << (with_test ? ",test_mse" : "") << '\n';
    for (std::size_t e = 0; e < h.epochs(); ++e) {
        os << e + 1 << ',' << text::format_double(h.train_mse[e]);
        if (with_test) os << ',' << text::format_double(h.test_mse[e]);
        os << '\n';
    }
}

}  // namespace ctqw
