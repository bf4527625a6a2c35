#pragma once

// Reference computations used only by tests. None of these share code paths
// with the library routines they check.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "ctqw/matrix.hpp"

namespace ctqw::oracle {

inline Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

/// Ascending eigenvalues from Eigen's self-adjoint solver.
inline std::vector<double> dense_eigenvalues(const Matrix<double>& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

/// exp(-i H t) by scaling and squaring of a truncated Taylor series.
inline Eigen::MatrixXcd taylor_propagator(const Matrix<double>& h, double t) {
    const Eigen::MatrixXcd a = std::complex<double>(0.0, -t) * to_eigen(h).cast<std::complex<double>>();
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::pow(2.0, squarings) > 0.5) ++squarings;
    const Eigen::MatrixXcd scaled = a / std::pow(2.0, squarings);
    const auto n = a.rows();
    Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 1; k <= 30; ++k) {
        term = term * scaled / static_cast<double>(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

/// Table-1 style initial density: e^{-2x_i^2} / sum_j e^{-2x_j^2} on linspace(a, b, n).
inline std::vector<double> gaussian_density(double a, double b, int n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = a + (b - a) * i / (n - 1);
        w[i] = std::exp(-2.0 * x * x);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

}  // namespace ctqw::oracle
