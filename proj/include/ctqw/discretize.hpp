#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ctqw/error.hpp"
#include "ctqw/matrix.hpp"

// Spatial discretization of the 1D Schroedinger problem in natural units
// (hbar = m = 1): uniform grid, three-point Laplacian with Dirichlet
// truncation, potential sampled at the nodes, and H = -L/2 + diag(V).
namespace ctqw {

class Grid {
public:
    Grid(double a, double b, std::size_t n_points) : a_(a), b_(b), n_(n_points) {
        if (!std::isfinite(a) || !std::isfinite(b) || b <= a)
            fail(ErrorKind::InvalidArgument,
                 "grid: right endpoint must exceed left endpoint (a=" + std::to_string(a) +
                     ", b=" + std::to_string(b) + ")");
        if (n_points < 3)
            fail(ErrorKind::InvalidArgument,
                 "grid: need at least 3 points, got " + std::to_string(n_points));
        dx_ = (b - a) / static_cast<double>(n_points - 1);
        nodes_.resize(n_points);
        for (std::size_t i = 0; i < n_points; ++i) nodes_[i] = a + static_cast<double>(i) * dx_;
    }

    double a() const { return a_; }
    double b() const { return b_; }
    std::size_t size() const { return n_; }
    double dx() const { return dx_; }
    const std::vector<double>& nodes() const { return nodes_; }
    double operator[](std::size_t i) const { return nodes_[i]; }

private:
    double a_;
    double b_;
    std::size_t n_;
    double dx_ = 0.0;
    std::vector<double> nodes_;
};

inline Grid make_grid(double a, double b, std::size_t n_points) { return Grid(a, b, n_points); }

/// Symmetric tridiagonal finite-difference Laplacian, stored by band.
struct LaplacianMatrix {
    std::size_t n = 0;
    double scale = 0.0;  // 1/dx^2

    double diagonal() const { return -2.0 * scale; }
    double off_diagonal() const { return scale; }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return diagonal();
        if (i + 1 == j || j + 1 == i) return off_diagonal();
        return 0.0;
    }

    Matrix<double> dense() const {
        Matrix<double> m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = diagonal();
            if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = off_diagonal();
        }
        return m;
    }

    // Rows 0 and n-1 see an implicit zero outside the domain (Dirichlet).
    std::vector<double> apply(std::span<const double> f) const {
        if (f.size() != n) fail(ErrorKind::DimensionMismatch, "laplacian: vector length mismatch");
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double left = i > 0 ? f[i - 1] : 0.0;
            const double right = i + 1 < n ? f[i + 1] : 0.0;
            out[i] = scale * (left - 2.0 * f[i] + right);
        }
        return out;
    }
};

inline LaplacianMatrix laplacian(const Grid& grid) {
    return LaplacianMatrix{grid.size(), 1.0 / (grid.dx() * grid.dx())};
}

struct PotentialVector {
    std::vector<double> values;
};

using PotentialFunction = std::function<double(double)>;

inline PotentialVector sample_potential(const Grid& grid, const PotentialFunction& v) {
    PotentialVector pot;
    pot.values.reserve(grid.size());
    for (double x : grid.nodes()) pot.values.push_back(v(x));
    return pot;
}

inline PotentialVector harmonic_potential(const Grid& grid) {
    return sample_potential(grid, [](double x) { return 0.5 * x * x; });
}

/// Real symmetric Hamiltonian in dense storage.
struct HamiltonianMatrix {
    Matrix<double> entries;

    std::size_t size() const { return entries.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

inline HamiltonianMatrix assemble_hamiltonian(const LaplacianMatrix& lap, const PotentialVector& pot) {
    if (pot.values.size() != lap.n)
        fail(ErrorKind::DimensionMismatch, "hamiltonian: potential has " + std::to_string(pot.values.size()) +
                                               " entries, laplacian order is " + std::to_string(lap.n));
    HamiltonianMatrix h{Matrix<double>(lap.n, lap.n)};
    const double diag = -0.5 * lap.diagonal();
    const double off = -0.5 * lap.off_diagonal();
    for (std::size_t i = 0; i < lap.n; ++i) {
        h.entries(i, i) = diag + pot.values[i];
        if (i + 1 < lap.n) h.entries(i, i + 1) = h.entries(i + 1, i) = off;
    }
    return h;
}

inline HamiltonianMatrix harmonic_hamiltonian(const Grid& grid) {
    return assemble_hamiltonian(laplacian(grid), harmonic_potential(grid));
}

}  // namespace ctqw
