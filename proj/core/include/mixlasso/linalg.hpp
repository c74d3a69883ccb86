#pragma once

// Dense linear-algebra primitives shared by the rest of the library.
//
// Storage is Eigen's column-major MatrixXd / VectorXd. spectral_norm is a plain
// power iteration with a fixed start vector, so results are reproducible
// bit-for-bit on a given platform. gram_deviation switches to a dense
// symmetric eigensolver up to kExactMinSingularDim.

#include <Eigen/Dense>

#include "mixlasso/errors.hpp"

namespace mixlasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

inline constexpr double kColumnNormFloor = 1e-12;

struct SpectralOptions {
    double tol = 1e-10;
    int max_iter = 20000;
    // Smallest singular value via inverse iteration on the Gram matrix when
    // its dimension is <= kExactMinSingularDim; a Gershgorin lower bound otherwise.
    bool min_singular = false;
};

inline constexpr Eigen::Index kExactMinSingularDim = 512;

struct SpectralReport {
    double operator_norm = 0.0;
    double min_singular = 0.0;
    bool min_singular_exact = false;  // false: bound (or not requested)
    int iterations = 0;
    // Relative change of the Rayleigh quotient on the last iteration.
    double residual = 0.0;
};

/// Power iteration failed to reach the tolerance; carries the last iterate.
class SpectralNotConverged : public Error {
public:
    SpectralNotConverged(SpectralReport last, Vector iterate)
        : Error("power iteration did not converge after " + std::to_string(last.iterations) +
                " iterations (residual " + std::to_string(last.residual) + ")"),
          last_(last), iterate_(std::move(iterate)) {}

    const SpectralReport& last() const noexcept { return last_; }
    const Vector& iterate() const noexcept { return iterate_; }

private:
    SpectralReport last_;
    Vector iterate_;
};

/// Throws InvalidArgument if any entry is NaN or infinite.
void require_finite(const MatrixRef& m, const char* what);

/// Largest singular value of `m` by power iteration on the smaller Gram matrix.
SpectralReport spectral_norm(const MatrixRef& m, const SpectralOptions& options = {});

/// ||M^t M - I|| in operator norm.
double gram_deviation(const MatrixRef& m, const SpectralOptions& options = {});

/// Mutual coherence: max |<M_j, M_j'>| over distinct normalized columns.
/// Throws DegenerateColumn for a zero column.
double coherence(const MatrixRef& m);

/// Scales every column to unit l2 norm. Throws DegenerateColumn when a
/// column norm is at or below `floor`.
Matrix normalize_columns(const MatrixRef& m, double floor = kColumnNormFloor);

/// Solves G x = b for symmetric positive definite G (Cholesky plus one step of
/// iterative refinement). Throws NotPositiveDefinite if the factorization fails
/// or the relative residual exceeds `tol`.
Vector solve_gram_system(const MatrixRef& gram, const VectorRef& b, double tol = 1e-10);

/// Inverse of a symmetric positive definite matrix via solve_gram_system.
Matrix inverse_spd(const MatrixRef& gram, double tol = 1e-10);

/// Columns `cols` of `m`, in the given order.
template <typename Indices>
Matrix select_columns(const MatrixRef& m, const Indices& cols) {
    Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    Eigen::Index k = 0;
    for (auto c : cols) out.col(k++) = m.col(static_cast<Eigen::Index>(c));
    return out;
}

}  // namespace mixlasso
