#include <gtest/gtest.h>

#include <cmath>

#include "mixlasso/linalg.hpp"
#include "mixlasso/rng.hpp"

using namespace mixlasso;

namespace {

Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

}  // namespace

TEST(SpectralNorm, DiagonalAndZero) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    EXPECT_NEAR(spectral_norm(d).operator_norm, 3.0, 1e-10);
    EXPECT_EQ(spectral_norm(Matrix::Zero(2, 2)).operator_norm, 0.0);
}

TEST(SpectralNorm, GoldenRatio) {
    Matrix m(2, 2);
    m << 1, 1, 0, 1;
    // M^t M = [[1,1],[1,2]], eigenvalues (3 +- sqrt 5)/2, sqrt of the larger is phi.
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    EXPECT_NEAR(spectral_norm(m).operator_norm, phi, 1e-9);
    EXPECT_NEAR(spectral_norm(m).operator_norm, 1.6180339887, 1e-10);
}

TEST(SpectralNorm, TransposeInvariance) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Matrix m = gaussian_matrix(20, 30, seed);
        EXPECT_NEAR(spectral_norm(m).operator_norm, spectral_norm(m.transpose()).operator_norm, 1e-8);
    }
}

TEST(SpectralNorm, MatchesSvd) {
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        const Matrix m = gaussian_matrix(15, 9, seed);
        SpectralOptions opt;
        opt.min_singular = true;
        const auto rep = spectral_norm(m, opt);
        const Vector sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
        EXPECT_NEAR(rep.operator_norm, sv(0), 1e-8 * sv(0));
        EXPECT_TRUE(rep.min_singular_exact);
        EXPECT_NEAR(rep.min_singular, sv(sv.size() - 1), 1e-6 * sv(0));
        EXPECT_LE(rep.min_singular, rep.operator_norm);
        EXPECT_LE(rep.residual, opt.tol);
    }
}

TEST(SpectralNorm, NonConvergenceCarriesIterate) {
    const Matrix m = gaussian_matrix(30, 30, 3);
    SpectralOptions opt;
    opt.max_iter = 1;
    opt.tol = 1e-15;
    try {
        spectral_norm(m, opt);
        FAIL() << "expected SpectralNotConverged";
    } catch (const SpectralNotConverged& e) {
        EXPECT_EQ(e.last().iterations, 1);
        EXPECT_EQ(e.iterate().size(), 30);
    }
}

TEST(SpectralNorm, RejectsNonFinite) {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = std::nan("");
    EXPECT_THROW(spectral_norm(m), InvalidArgument);
}

TEST(GramDeviation, Examples) {
    EXPECT_NEAR(gram_deviation(Matrix::Identity(3, 3)), 0.0, 1e-12);
    Matrix unit = Matrix::Zero(3, 1);
    unit(1, 0) = 1.0;
    EXPECT_NEAR(gram_deviation(unit), 0.0, 1e-12);
    Matrix m(2, 2);
    m << 1, 1 / std::sqrt(2.0), 0, 1 / std::sqrt(2.0);
    EXPECT_NEAR(gram_deviation(m), 0.7071067812, 1e-9);
}

TEST(GramDeviation, OrthonormalColumns) {
    const Matrix g = gaussian_matrix(12, 5, 77);
    const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(12, 5);
    EXPECT_LE(gram_deviation(q), 1e-10);
}

TEST(Coherence, Examples) {
    EXPECT_EQ(coherence(Matrix::Identity(4, 4)), 0.0);
    Matrix dup = Matrix::Zero(2, 2);
    dup(0, 0) = dup(0, 1) = 1.0;
    EXPECT_NEAR(coherence(dup), 1.0, 1e-15);
    Matrix three(2, 3);
    three << 1, 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0), 1;
    EXPECT_NEAR(coherence(three), 0.7071067812, 1e-10);
}

TEST(Coherence, ZeroColumnNamed) {
    Matrix m = Matrix::Identity(3, 3);
    m.col(2).setZero();
    try {
        coherence(m);
        FAIL() << "expected DegenerateColumn";
    } catch (const DegenerateColumn& e) {
        EXPECT_EQ(e.column(), 2u);
    }
}

TEST(Coherence, ScaleInvariant) {
    const Matrix m = gaussian_matrix(10, 6, 5);
    Matrix scaled = m;
    for (int j = 0; j < 6; ++j) scaled.col(j) *= 0.1 + 3.0 * j;
    EXPECT_NEAR(coherence(m), coherence(scaled), 1e-12);
}

TEST(NormalizeColumns, Examples) {
    Matrix a(2, 1);
    a << 2, 0;
    EXPECT_EQ(normalize_columns(a), (Matrix(2, 1) << 1, 0).finished());
    Matrix b(2, 1);
    b << 3, 4;
    const Matrix nb = normalize_columns(b);
    EXPECT_NEAR(nb(0, 0), 0.6, 1e-15);
    EXPECT_NEAR(nb(1, 0), 0.8, 1e-15);
    const Matrix u = normalize_columns(gaussian_matrix(6, 4, 9));
    EXPECT_LE((normalize_columns(u) - u).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NormalizeColumns, FloorRaises) {
    Matrix m = Matrix::Identity(2, 2);
    m(1, 1) = 1e-13;
    try {
        normalize_columns(m);
        FAIL() << "expected DegenerateColumn";
    } catch (const DegenerateColumn& e) {
        EXPECT_EQ(e.column(), 1u);
    }
}

TEST(SolveGramSystem, Examples) {
    Vector b(2);
    b << 1, 2;
    EXPECT_LE((solve_gram_system(Matrix::Identity(2, 2), b) - b).norm(), 1e-15);
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = 2;
    g(1, 1) = 4;
    b << 2, 4;
    EXPECT_LE((solve_gram_system(g, b) - Vector::Ones(2)).norm(), 1e-15);
    g << 2, 1, 1, 2;
    b << 3, 3;
    EXPECT_LE((solve_gram_system(g, b) - Vector::Ones(2)).norm(), 1e-14);
}

TEST(SolveGramSystem, IndefiniteRaises) {
    Matrix g(2, 2);
    g << 1, 2, 2, 1;
    EXPECT_THROW(solve_gram_system(g, Vector::Ones(2)), NotPositiveDefinite);
    EXPECT_THROW(solve_gram_system(Matrix::Zero(2, 2), Vector::Ones(2)), NotPositiveDefinite);
}

TEST(SolveGramSystem, ReproducesRightHandSide) {
    const Matrix a = gaussian_matrix(30, 10, 4);
    const Matrix g = a.transpose() * a;
    const Vector b = gaussian_matrix(10, 1, 8).col(0);
    const Vector x = solve_gram_system(g, b);
    EXPECT_LE((g * x - b).norm(), 1e-10 * b.norm());
}
