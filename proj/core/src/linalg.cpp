#include "mixlasso/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace mixlasso {
namespace {

// Applies the Gram operator of `m` on its smaller side: (M^t M) v when
// cols <= rows, (M M^t) v otherwise. Both share the nonzero spectrum.
class GramOperator {
public:
    explicit GramOperator(const MatrixRef& m) : m_(m), use_cols_(m.cols() <= m.rows()) {}

    Eigen::Index dim() const { return use_cols_ ? m_.cols() : m_.rows(); }

    void apply(const Vector& v, Vector& out) const {
        if (use_cols_) {
            tmp_.noalias() = m_ * v;
            out.noalias() = m_.transpose() * tmp_;
        } else {
            tmp_.noalias() = m_.transpose() * v;
            out.noalias() = m_ * tmp_;
        }
    }

    Matrix dense() const {
        if (use_cols_) return m_.transpose() * m_;
        return m_ * m_.transpose();
    }

private:
    const MatrixRef& m_;
    bool use_cols_;
    mutable Vector tmp_;
};

// Deterministic fallback start vector for when the all-ones start lies in the
// null space of the operator.
Vector fallback_start(Eigen::Index dim) {
    Vector v(dim);
    std::uint64_t state = 0x9E3779B97F4A7C15ULL;
    for (Eigen::Index i = 0; i < dim; ++i) {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        v[i] = static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
    }
    return v.normalized();
}

// Largest eigenvalue of the PSD operator by power iteration.
SpectralReport largest_eigenvalue(const GramOperator& op, const SpectralOptions& options) {
    const Eigen::Index dim = op.dim();
    SpectralReport report;
    Vector v = Vector::Ones(dim) / std::sqrt(static_cast<double>(dim));
    Vector w(dim);
    op.apply(v, w);
    double theta = v.dot(w);
    if (!(w.norm() > 0.0)) {
        v = fallback_start(dim);
        op.apply(v, w);
        theta = v.dot(w);
        if (!(w.norm() > 0.0)) {
            // Zero operator.
            return report;
        }
    }
    for (int it = 1; it <= options.max_iter; ++it) {
        v = w / w.norm();
        op.apply(v, w);
        const double next = v.dot(w);
        report.iterations = it;
        report.residual = std::abs(next - theta) / std::max(next, std::numeric_limits<double>::min());
        theta = next;
        if (report.residual <= options.tol) {
            report.operator_norm = std::sqrt(std::max(theta, 0.0));
            return report;
        }
    }
    report.operator_norm = std::sqrt(std::max(theta, 0.0));
    throw SpectralNotConverged(report, v);
}

double smallest_eigenvalue_exact(const Matrix& gram, const SpectralOptions& options) {
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) return 0.0;
    const Eigen::Index dim = gram.rows();
    Vector v = Vector::Ones(dim) / std::sqrt(static_cast<double>(dim));
    double theta = 0.0;
    for (int it = 1; it <= options.max_iter; ++it) {
        Vector w = llt.solve(v);
        const double nrm = w.norm();
        if (!std::isfinite(nrm) || nrm == 0.0) return 0.0;
        const double next = v.dot(w);  // Rayleigh quotient of G^{-1}
        v = w / nrm;
        if (it > 1 && std::abs(next - theta) <= options.tol * std::abs(next)) return 1.0 / next;
        theta = next;
    }
    throw SpectralNotConverged(SpectralReport{0.0, 1.0 / theta, true, options.max_iter, 0.0}, v);
}

double gershgorin_lower_bound(const Matrix& gram) {
    double bound = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
        const double off = gram.row(i).cwiseAbs().sum() - std::abs(gram(i, i));
        bound = std::min(bound, gram(i, i) - off);
    }
    return std::max(bound, 0.0);
}

}  // namespace

void require_finite(const MatrixRef& m, const char* what) {
    if (!m.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

SpectralReport spectral_norm(const MatrixRef& m, const SpectralOptions& options) {
    if (m.size() == 0) throw InvalidArgument("spectral_norm: empty matrix");
    if (!(options.tol > 0.0)) throw InvalidArgument("spectral_norm: tol must be positive");
    require_finite(m, "spectral_norm");
    GramOperator op(m);
    SpectralReport report = largest_eigenvalue(op, options);
    if (options.min_singular) {
        // Singular values beyond min(rows, cols) are zero; the smaller Gram side
        // holds exactly min(rows, cols) eigenvalues.
        const Matrix gram = op.dense();
        if (gram.rows() <= kExactMinSingularDim) {
            report.min_singular = std::sqrt(std::max(smallest_eigenvalue_exact(gram, options), 0.0));
            report.min_singular_exact = true;
        } else {
            report.min_singular = std::sqrt(gershgorin_lower_bound(gram));
        }
        report.min_singular = std::min(report.min_singular, report.operator_norm);
    }
    return report;
}

double gram_deviation(const MatrixRef& m, const SpectralOptions& options) {
    if (m.cols() < 1) throw InvalidArgument("gram_deviation: matrix has no columns");
    require_finite(m, "gram_deviation");
    Matrix dev = m.transpose() * m;
    dev.diagonal().array() -= 1.0;
    // Deviations come in +- pairs of nearly equal size, where power iteration crawls.
    if (dev.rows() <= kExactMinSingularDim) {
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(dev, Eigen::EigenvaluesOnly);
        return eig.eigenvalues().cwiseAbs().maxCoeff();
    }
    return spectral_norm(dev, options).operator_norm;
}

double coherence(const MatrixRef& m) {
    if (m.cols() < 2) throw InvalidArgument("coherence: need at least two columns");
    const Matrix unit = normalize_columns(m, 0.0);
    double mu = 0.0;
    for (Eigen::Index j = 0; j < unit.cols(); ++j)
        for (Eigen::Index k = j + 1; k < unit.cols(); ++k)
            mu = std::max(mu, std::abs(unit.col(j).dot(unit.col(k))));
    return mu;
}

Matrix normalize_columns(const MatrixRef& m, double floor) {
    Matrix out(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double nrm = m.col(j).norm();
        if (!(nrm > floor)) throw DegenerateColumn(static_cast<std::size_t>(j), nrm, "normalize_columns");
        out.col(j) = m.col(j) / nrm;
    }
    return out;
}

Vector solve_gram_system(const MatrixRef& gram, const VectorRef& b, double tol) {
    if (gram.rows() != gram.cols() || gram.rows() != b.size())
        throw InvalidArgument("solve_gram_system: dimension mismatch");
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("solve_gram_system: Cholesky factorization failed");
    Vector x = llt.solve(b);
    Vector r = b - gram * x;
    x += llt.solve(r);
    r = b - gram * x;
    const double bnorm = b.norm();
    if (!x.allFinite() || r.norm() > tol * std::max(bnorm, std::numeric_limits<double>::min()))
        throw NotPositiveDefinite("solve_gram_system: residual above tolerance; Gram matrix is numerically singular");
    return x;
}

Matrix inverse_spd(const MatrixRef& gram, double tol) {
    const Eigen::Index dim = gram.rows();
    Matrix inv(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) inv.col(j) = solve_gram_system(gram, Vector::Unit(dim, j), tol);
    return inv;
}

}  // namespace mixlasso
