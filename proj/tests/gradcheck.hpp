#pragma once

// Central finite-difference oracle for the surrogate's parameter gradients.
// Only the forward pass and mse are used; backward is never called here.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ctqw/surrogate.hpp"

namespace ctqw::oracle {

struct GradCheckResult {
    double worst_relative_error = 0.0;
    std::string worst_tensor;
    std::size_t checked = 0;
};

// Denominator floor keeps the ratio meaningful for gradients that are
// numerically zero (FD noise alone is ~1e-11 at step 1e-5).
inline constexpr double kRelativeFloor = 1e-8;

inline double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kRelativeFloor});
}

inline GradCheckResult gradient_check(SurrogateModel model, const Frames& window, const Frame& target,
                                      const SurrogateParams& analytic, double step = 1e-5) {
    GradCheckResult result;
    auto params = model.params.tensors();
    const auto grads = analytic.tensors();
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < params[t].values.size(); ++i) {
            double& theta = params[t].values[i];
            const double saved = theta;
            theta = saved + step;
            const double up = mse(predict(model, window), target);
            theta = saved - step;
            const double down = mse(predict(model, window), target);
            theta = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double err = relative_error(grads[t].values[i], numeric);
            if (err > result.worst_relative_error) {
                result.worst_relative_error = err;
                result.worst_tensor = params[t].name + "[" + std::to_string(i) + "]";
            }
            ++result.checked;
        }
    }
    return result;
}

/// Random tiny instance: model, window and target drawn from `seed`.
struct TinyInstance {
    SurrogateModel model;
    Frames window;
    Frame target;
};

inline TinyInstance tiny_instance(std::size_t input_dim, std::size_t hidden_dim, std::size_t lookback,
                                  std::uint64_t seed) {
    TinyInstance inst{init_model(input_dim, hidden_dim, seed), {}, {}};
    std::mt19937_64 rng(seed * 7919 + 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // non-trivial biases so every gate is exercised away from its init value
    for (auto& t : inst.model.params.tensors())
        if (t.rows == 1)
            for (double& v : t.values) v += 0.5 * u(rng);
    for (std::size_t s = 0; s < lookback; ++s) {
        Frame x(input_dim);
        for (double& v : x) v = u(rng);
        inst.window.push_back(x);
    }
    inst.target.resize(input_dim);
    for (double& v : inst.target) v = u(rng);
    return inst;
}

}  // namespace ctqw::oracle
