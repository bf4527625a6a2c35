#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "ctqw/discretize.hpp"
#include "ctqw/error.hpp"
#include "ctqw/matrix.hpp"
#include "ctqw/wave_state.hpp"

namespace ctqw {

/**
 * H = Q diag(eigenvalues) Q^T with Q orthogonal.
 *
 * Eigenvalues are ascending. Each column of Q is signed so that its
 * largest-magnitude entry (lowest index on ties) is positive, which makes
 * the factorization reproducible for non-degenerate spectra.
 */
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    Matrix<double> eigenvectors;  // column k pairs with eigenvalues[k]

    std::size_t size() const { return eigenvalues.size(); }
};

namespace detail {

// Householder reduction of a symmetric matrix to tridiagonal form.
// On return `v` holds the accumulated orthogonal transform, `d` the
// diagonal and `e` the subdiagonal (e[0] unused).
inline void householder_tridiagonalize(Matrix<double>& v, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = v.rows();
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e), rotating the columns of v.
inline void tridiagonal_ql(Matrix<double>& v, std::vector<double>& d, std::vector<double>& e,
                           int max_iterations_per_eigenvalue) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

        if (m > l) {
            int iter = 0;
            do {
                if (++iter > max_iterations_per_eigenvalue)
                    fail(ErrorKind::Numerical,
                         "eigendecompose: QL iteration did not converge for eigenvalue " + std::to_string(l) +
                             " after " + std::to_string(max_iterations_per_eigenvalue) +
                             " iterations (|offdiag|=" + std::to_string(std::abs(e[l])) + ")");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = v(k, ii + 1);
                        v(k, ii + 1) = s * v(k, ii) + c * h;
                        v(k, ii) = c * v(k, ii) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

}  // namespace detail

inline bool is_symmetric(const Matrix<double>& m, double relative_tolerance) {
    if (m.rows() != m.cols()) return false;
    const double bound = relative_tolerance * max_abs(m);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > bound) return false;
    return true;
}

inline SpectralDecomposition eigendecompose(const Matrix<double>& h, int max_iterations_per_eigenvalue = 60) {
    if (h.rows() == 0 || h.rows() != h.cols())
        fail(ErrorKind::DimensionMismatch, "eigendecompose: matrix must be square and non-empty");
    if (!is_symmetric(h, 1e-12)) fail(ErrorKind::InvalidArgument, "eigendecompose: matrix is not symmetric");
    for (double x : h.flat())
        if (!std::isfinite(x)) fail(ErrorKind::Numerical, "eigendecompose: matrix has non-finite entries");

    const std::size_t n = h.rows();
    Matrix<double> v = h;
    std::vector<double> d(n), e(n);
    if (n == 1) {
        return {{h(0, 0)}, Matrix<double>::identity(1)};
    }
    detail::householder_tridiagonalize(v, d, e);
    detail::tridiagonal_ql(v, d, e, max_iterations_per_eigenvalue);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

    SpectralDecomposition out{std::vector<double>(n), Matrix<double>(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.eigenvalues[k] = d[src];
        std::size_t pivot = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(v(i, src)) > std::abs(v(pivot, src))) pivot = i;
        const double sign = v(pivot, src) < 0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = sign * v(i, src);
    }
    return out;
}

inline SpectralDecomposition eigendecompose(const HamiltonianMatrix& h) { return eigendecompose(h.entries); }

/// U(dt) = exp(-i H dt), materialized as a dense complex matrix.
struct Propagator {
    double dt = 0.0;
    Matrix<Complex> matrix;

    std::size_t size() const { return matrix.rows(); }
};

inline Propagator build_propagator(const SpectralDecomposition& spec, double dt) {
    if (!std::isfinite(dt)) fail(ErrorKind::InvalidArgument, "build_propagator: time step is not finite");
    const std::size_t n = spec.size();
    const Matrix<double>& q = spec.eigenvectors;

    std::vector<Complex> phase(n);
    for (std::size_t k = 0; k < n; ++k) phase[k] = std::polar(1.0, -spec.eigenvalues[k] * dt);

    // U_jl = sum_k Q_jk phase_k Q_lk
    Matrix<Complex> qp(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) qp(j, k) = q(j, k) * phase[k];
    Propagator u{dt, Matrix<Complex>(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = j; l < n; ++l) {
            Complex acc{};
            for (std::size_t k = 0; k < n; ++k) acc += qp(j, k) * q(l, k);
            u.matrix(j, l) = acc;
            u.matrix(l, j) = acc;  // Q diag Q^T is complex symmetric
        }
    }
    return u;
}

inline WaveState apply_propagator(const Propagator& u, const WaveState& psi) {
    if (psi.size() != u.size())
        fail(ErrorKind::DimensionMismatch, "apply_propagator: state has " + std::to_string(psi.size()) +
                                               " amplitudes, propagator order is " + std::to_string(u.size()));
    return WaveState{matvec<Complex>(u.matrix, psi.amplitudes), psi.time + u.dt};
}

/// psi(t) = Q exp(-i Lambda t) Q^T psi(0), evaluated without stepping.
inline WaveState evolve_direct(const SpectralDecomposition& spec, const WaveState& psi0, double t) {
    const std::size_t n = spec.size();
    if (psi0.size() != n) fail(ErrorKind::DimensionMismatch, "evolve_direct: dimension mismatch");
    if (!std::isfinite(t)) fail(ErrorKind::InvalidArgument, "evolve_direct: time is not finite");
    const Matrix<double>& q = spec.eigenvectors;

    std::vector<Complex> coeff(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex c{};
        for (std::size_t i = 0; i < n; ++i) c += q(i, k) * psi0.amplitudes[i];
        coeff[k] = c * std::polar(1.0, -spec.eigenvalues[k] * t);
    }
    WaveState out{std::vector<Complex>(n), psi0.time + t};
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc{};
        for (std::size_t k = 0; k < n; ++k) acc += q(i, k) * coeff[k];
        out.amplitudes[i] = acc;
    }
    return out;
}

/// Debug dump: first row holds eigenvalues, then one row per component;
/// column k is eigenpair k.
inline void write_spectrum_csv(std::ostream& os, const SpectralDecomposition& spec) {
    const std::size_t n = spec.size();
    const auto old_precision = os.precision(17);
    os << "row";
    for (std::size_t k = 0; k < n; ++k) os << ",pair_" << k;
    os << "\nlambda";
    for (double lam : spec.eigenvalues) os << ',' << lam;
    os << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        os << "q_" << i;
        for (std::size_t k = 0; k < n; ++k) os << ',' << spec.eigenvectors(i, k);
        os << '\n';
    }
    os.precision(old_precision);
}

}  // namespace ctqw
