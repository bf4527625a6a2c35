#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctqw/spectral.hpp"
#include "oracles.hpp"

using namespace ctqw;

namespace {

const HamiltonianMatrix& reference_h() {
    static const HamiltonianMatrix h = harmonic_hamiltonian(make_grid(-5.0, 5.0, 200));
    return h;
}

const SpectralDecomposition& reference_spec() {
    static const SpectralDecomposition s = eigendecompose(reference_h());
    return s;
}

Matrix<double> matrix_from(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix<double> m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (auto r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix<double> reconstruct(const SpectralDecomposition& s) {
    const std::size_t n = s.size();
    Matrix<double> ql(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) ql(i, k) = s.eigenvectors(i, k) * s.eigenvalues[k];
    return matmul(ql, transpose(s.eigenvectors));
}

double orthogonality_error(const Matrix<double>& q) {
    return max_abs_diff(matmul(transpose(q), q), Matrix<double>::identity(q.rows()));
}

double unitarity_error(const Propagator& u) {
    return max_abs_diff(matmul(conjugate_transpose(u.matrix), u.matrix), Matrix<Complex>::identity(u.size()));
}

Matrix<double> random_symmetric(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    Matrix<double> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = dist(rng);
    return m;
}

}  // namespace

TEST(eigendecompose, diagonal_input) {
    const auto s = eigendecompose(matrix_from({{2, 0}, {0, 3}}));
    EXPECT_NEAR(s.eigenvalues[0], 2.0, 1e-14);
    EXPECT_NEAR(s.eigenvalues[1], 3.0, 1e-14);
    EXPECT_NEAR(max_abs_diff(s.eigenvectors, Matrix<double>::identity(2)), 0.0, 1e-14);
}

TEST(eigendecompose, two_by_two_closed_form) {
    const auto s = eigendecompose(matrix_from({{0, 1}, {1, 0}}));
    EXPECT_NEAR(s.eigenvalues[0], -1.0, 1e-14);
    EXPECT_NEAR(s.eigenvalues[1], 1.0, 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    // sign convention: largest-magnitude entry positive, lowest index on ties
    EXPECT_NEAR(s.eigenvectors(0, 0), r, 1e-14);
    EXPECT_NEAR(s.eigenvectors(1, 0), -r, 1e-14);
    EXPECT_NEAR(s.eigenvectors(0, 1), r, 1e-14);
    EXPECT_NEAR(s.eigenvectors(1, 1), r, 1e-14);
}

TEST(eigendecompose, oscillator_spectrum_against_dense_oracle) {
    const auto& s = reference_spec();
    const auto oracle_values = oracle::dense_eigenvalues(reference_h().entries);
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(s.eigenvalues[k], oracle_values[k], 1e-9);
    EXPECT_NEAR(s.eigenvalues[0], 0.5, 1e-3);
    EXPECT_NEAR(s.eigenvalues[1], 1.5, 1e-3);
}

TEST(eigendecompose, oscillator_levels_carry_only_stencil_error) {
    // The three-point stencil shifts level n by -dx^2 <p^4> / 24 with
    // <p^4> = (6n^2 + 6n + 3) / 4, so the gap to n + 1/2 grows like n^2;
    // what remains is O(dx^4).
    const auto& s = reference_spec();
    const double dx = 10.0 / 199.0;
    for (int n = 0; n <= 5; ++n) {
        const double shift = dx * dx * (6.0 * n * n + 6.0 * n + 3.0) / 96.0;
        EXPECT_NEAR(s.eigenvalues[n], n + 0.5 - shift, 1e-4) << "level " << n;
    }
}

TEST(eigendecompose, residual_and_orthogonality) {
    const auto& s = reference_spec();
    const auto& h = reference_h().entries;
    EXPECT_LE(orthogonality_error(s.eigenvectors), 1e-10);
    Matrix<double> hq = matmul(h, s.eigenvectors);
    double residual = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t k = 0; k < s.size(); ++k)
            residual = std::max(residual, std::abs(hq(i, k) - s.eigenvectors(i, k) * s.eigenvalues[k]));
    EXPECT_LE(residual, 1e-8 * max_abs(h));
    EXPECT_LE(max_abs_diff(reconstruct(s), h), 1e-8 * max_abs(h));
}

TEST(eigendecompose, ascending_and_sign_convention) {
    const auto& s = reference_spec();
    for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LE(s.eigenvalues[k - 1], s.eigenvalues[k]);
    for (std::size_t k = 0; k < s.size(); ++k) {
        std::size_t pivot = 0;
        for (std::size_t i = 1; i < s.size(); ++i)
            if (std::abs(s.eigenvectors(i, k)) > std::abs(s.eigenvectors(pivot, k))) pivot = i;
        EXPECT_GT(s.eigenvectors(pivot, k), 0.0);
    }
}

TEST(eigendecompose, dense_random_symmetric_matrices) {
    for (unsigned seed : {1u, 2u, 3u}) {
        const Matrix<double> m = random_symmetric(40, seed);
        const auto s = eigendecompose(m);
        const auto expected = oracle::dense_eigenvalues(m);
        for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(s.eigenvalues[k], expected[k], 1e-10);
        EXPECT_LE(orthogonality_error(s.eigenvectors), 1e-12);
        EXPECT_LE(max_abs_diff(reconstruct(s), m), 1e-12 * 40 * max_abs(m));
    }
}

TEST(eigendecompose, deterministic) {
    const auto a = eigendecompose(reference_h());
    const auto b = eigendecompose(reference_h());
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);
    EXPECT_EQ(a.eigenvectors, b.eigenvectors);
}

TEST(eigendecompose, rejects_non_symmetric) {
    try {
        eigendecompose(matrix_from({{1, 2}, {0, 1}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}

TEST(eigendecompose, convergence_failure_reported) {
    try {
        eigendecompose(random_symmetric(10, 7), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Numerical);
        EXPECT_NE(std::string(e.what()).find("did not converge"), std::string::npos);
    }
}

TEST(propagator, zero_step_is_identity) {
    const Propagator u = build_propagator(reference_spec(), 0.0);
    EXPECT_LE(max_abs_diff(u.matrix, Matrix<Complex>::identity(u.size())), 1e-12);
}

TEST(propagator, unitary_and_group_inverse) {
    const Propagator u = build_propagator(reference_spec(), 0.05);
    const Propagator back = build_propagator(reference_spec(), -0.05);
    EXPECT_LE(unitarity_error(u), 1e-10);
    EXPECT_LE(max_abs_diff(matmul(u.matrix, back.matrix), Matrix<Complex>::identity(u.size())), 1e-10);
}

TEST(propagator, semigroup) {
    const Propagator u1 = build_propagator(reference_spec(), 0.05);
    const Propagator u2 = build_propagator(reference_spec(), 0.10);
    const Propagator u3 = build_propagator(reference_spec(), 0.17);
    EXPECT_LE(max_abs_diff(matmul(u1.matrix, u1.matrix), u2.matrix), 1e-9);
    EXPECT_LE(max_abs_diff(matmul(u2.matrix, u3.matrix), build_propagator(reference_spec(), 0.27).matrix), 1e-9);
}

TEST(propagator, matches_taylor_series_oracle) {
    const Grid g = make_grid(-5.0, 5.0, 60);
    const HamiltonianMatrix h = harmonic_hamiltonian(g);
    const Propagator u = build_propagator(eigendecompose(h), 0.05);
    const Eigen::MatrixXcd expected = oracle::taylor_propagator(h.entries, 0.05);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < u.size(); ++j) err = std::max(err, std::abs(u.matrix(i, j) - expected(i, j)));
    EXPECT_LE(err, 1e-10);
}

TEST(propagator, rejects_non_finite_step) {
    EXPECT_THROW(build_propagator(reference_spec(), std::nan("")), Error);
    EXPECT_THROW(build_propagator(reference_spec(), INFINITY), Error);
}

TEST(apply_propagator, identity_leaves_state) {
    const Propagator u = build_propagator(reference_spec(), 0.0);
    WaveState psi{std::vector<Complex>(200), 0.0};
    for (std::size_t i = 0; i < 200; ++i) psi.amplitudes[i] = Complex(std::sin(0.1 * i), std::cos(0.3 * i));
    const WaveState out = apply_propagator(u, psi);
    EXPECT_LE(max_abs_diff<Complex>(out.amplitudes, psi.amplitudes), 1e-12);
}

TEST(apply_propagator, eigenvector_picks_up_phase) {
    const auto& s = reference_spec();
    const double dt = 0.05;
    const Propagator u = build_propagator(s, dt);
    for (std::size_t k : {0u, 3u}) {
        WaveState psi{std::vector<Complex>(s.size()), 0.0};
        for (std::size_t i = 0; i < s.size(); ++i) psi.amplitudes[i] = s.eigenvectors(i, k);
        const WaveState out = apply_propagator(u, psi);
        const Complex phase = std::polar(1.0, -s.eigenvalues[k] * dt);
        for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(std::abs(out.amplitudes[i] - phase * psi.amplitudes[i]), 1e-12);
        EXPECT_DOUBLE_EQ(out.time, dt);
    }
}

TEST(apply_propagator, norm_preserved_over_many_steps) {
    const Propagator u = build_propagator(reference_spec(), 0.05);
    WaveState psi{std::vector<Complex>(200), 0.0};
    std::mt19937 rng(5);
    std::normal_distribution<double> dist;
    for (auto& z : psi.amplitudes) z = Complex(dist(rng), dist(rng));
    const double n0 = squared_norm(psi);
    for (int step = 0; step < 100; ++step) {
        const double before = squared_norm(psi);
        psi = apply_propagator(u, psi);
        EXPECT_LE(std::abs(squared_norm(psi) - before), 1e-12 * before);
    }
    EXPECT_LE(std::abs(squared_norm(psi) - n0), 1e-10 * n0);
}

TEST(apply_propagator, dimension_mismatch) {
    const Propagator u = build_propagator(reference_spec(), 0.05);
    WaveState psi{std::vector<Complex>(10), 0.0};
    try {
        apply_propagator(u, psi);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}
