#pragma once

#include <complex>
#include <vector>

#include "ctqw/matrix.hpp"

namespace ctqw {

/// Complex amplitudes over the grid nodes at time `time`.
struct WaveState {
    std::vector<Complex> amplitudes;
    double time = 0.0;

    std::size_t size() const { return amplitudes.size(); }
};

/// |psi_i|^2 sampled at the nodes.
struct DensityFrame {
    double time = 0.0;
    std::vector<double> density;
};

inline double squared_norm(const WaveState& psi) {
    double s = 0.0;
    for (const Complex& z : psi.amplitudes) s += z.real() * z.real() + z.imag() * z.imag();
    return s;
}

inline DensityFrame density(const WaveState& psi) {
    DensityFrame frame{psi.time, {}};
    frame.density.reserve(psi.size());
    for (const Complex& z : psi.amplitudes) frame.density.push_back(z.real() * z.real() + z.imag() * z.imag());
    return frame;
}

}  // namespace ctqw
