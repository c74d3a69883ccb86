#include "mixlasso/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

namespace mixlasso {

double default_lambda(double sigma, double alpha, double p) {
    if (!(sigma > 0.0)) throw InvalidArgument("default_lambda: sigma must be positive");
    if (!(alpha > 0.0)) throw InvalidArgument("default_lambda: alpha must be positive");
    if (!(p >= 2.0)) throw InvalidArgument("default_lambda: p must be >= 2");
    return 2.0 * sigma * std::sqrt(2.0 * alpha * std::log(p));
}

double soft_threshold(double value, double threshold) noexcept {
    if (value > threshold) return value - threshold;
    if (value < -threshold) return value + threshold;
    return 0.0;
}

double lasso_objective(const MatrixRef& X, const VectorRef& y, const VectorRef& beta, double lambda) {
    return 0.5 * (y - X * beta).squaredNorm() + lambda * beta.lpNorm<1>();
}

namespace {

// Minimum number of columns added to the working set per outer round.
constexpr std::size_t kWorkingSetGrowth = 10;

struct Certificate {
    double primal = 0.0;
    double gap = 0.0;
    double kkt = 0.0;
};

// `residual` = y - X beta, `correlation` = X^t residual.
Certificate certify(const VectorRef& y, const VectorRef& beta, const Vector& residual, const Vector& correlation,
                    double lambda) {
    Certificate c;
    c.primal = 0.5 * residual.squaredNorm() + lambda * beta.lpNorm<1>();
    c.kkt = correlation.size() > 0 ? correlation.lpNorm<Eigen::Infinity>() : 0.0;
    const double scale = c.kkt > lambda ? lambda / c.kkt : 1.0;
    const double dual = 0.5 * y.squaredNorm() - 0.5 * (y - scale * residual).squaredNorm();
    c.gap = c.primal - dual;
    return c;
}

double initial_lipschitz(const MatrixRef& X) {
    SpectralOptions opts;
    opts.tol = 1e-6;
    opts.max_iter = 300;
    double norm = 0.0;
    try {
        norm = spectral_norm(X, opts).operator_norm;
    } catch (const SpectralNotConverged& e) {
        norm = e.last().operator_norm;
    }
    return std::max(norm * norm, 1e-12);
}

}  // namespace

double lasso_duality_gap(const MatrixRef& X, const VectorRef& y, const VectorRef& beta, double lambda) {
    const Vector r = y - X * beta;
    const Vector corr = X.transpose() * r;
    return certify(y, beta, r, corr, lambda).gap;
}

namespace {

struct InnerResult {
    int iterations = 0;
    bool converged = false;
};

// Exact minimizer of the objective restricted to the current support with
// the current signs: X_A^t X_A b = X_A^t y - lambda sgn(x_A). Accepted only when
// the signs are reproduced and the objective does not increase. FISTA alone
// crawls along the flat directions between near-duplicate columns.
bool polish(const MatrixRef& X, const VectorRef& y, double lambda, Vector& x, Vector& Xx, double& Fx) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < x.size(); ++j)
        if (x[j] != 0.0) support.push_back(j);
    if (support.empty() || static_cast<Eigen::Index>(support.size()) > X.rows()) return false;
    const Matrix XA = X(Eigen::all, support);
    Vector signs(static_cast<Eigen::Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i) signs[static_cast<Eigen::Index>(i)] = x[support[i]] > 0.0 ? 1.0 : -1.0;
    Vector b;
    try {
        b = solve_gram_system(XA.transpose() * XA, XA.transpose() * y - lambda * signs);
    } catch (const NotPositiveDefinite&) {
        return false;
    }
    for (Eigen::Index i = 0; i < b.size(); ++i)
        if (!(b[i] * signs[i] > 0.0)) return false;
    Vector candidate = Vector::Zero(x.size());
    candidate(support) = b;
    const Vector Xc = XA * b;
    const double Fc = 0.5 * (y - Xc).squaredNorm() + lambda * b.lpNorm<1>();
    if (!(Fc <= Fx)) return false;
    x = std::move(candidate);
    Xx = Xc;
    Fx = Fc;
    return true;
}

// FISTA with backtracking and function-value restart on the columns of X.
// `x` is updated in place; `cert` holds the certificate of the final iterate.
InnerResult fista(const MatrixRef& X, const VectorRef& y, double lambda, Vector& x, int budget,
                  const LassoOptions& options, double kkt_floor, std::vector<double>* trace, Certificate& cert) {
    const Eigen::Index p = X.cols();
    const int gap_every = std::max(options.gap_every, 1);
    auto converged = [&](const Certificate& c) {
        return c.gap <= options.tol * std::max(1.0, c.primal) && c.kkt <= lambda * (1.0 + options.kkt_tol) + kkt_floor;
    };

    // Products with X are carried along so each iteration needs one X v and one X^t v.
    Vector Xx = X * x;
    Vector residual = y - Xx;
    Vector corr = X.transpose() * residual;
    cert = certify(y, x, residual, corr, lambda);
    if (converged(cert)) return {0, true};
    double Fx = cert.primal;

    double L = initial_lipschitz(X);
    double t = 1.0;
    Vector v = x, Xv = Xx;
    Vector x_prev = x, Xx_prev = Xx;
    Vector z(p), Xz(X.rows()), grad(p);

    for (int it = 1; it <= budget; ++it) {
        grad.noalias() = X.transpose() * (Xv - y);

        // Backtracking on the exact quadratic model: ||X (z - v)||^2 <= L ||z - v||^2.
        for (int bt = 0; bt < 60; ++bt) {
            const double step = 1.0 / L;
            for (Eigen::Index j = 0; j < p; ++j) z[j] = soft_threshold(v[j] - step * grad[j], lambda * step);
            Xz.noalias() = X * z;
            const double lhs = (Xz - Xv).squaredNorm();
            const double rhs = L * (z - v).squaredNorm();
            if (lhs <= rhs * (1.0 + 1e-12)) break;
            L *= 2.0;
        }
        const double Fz = 0.5 * (y - Xz).squaredNorm() + lambda * z.lpNorm<1>();

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        x_prev = x;
        Xx_prev = Xx;
        // Without momentum z is a plain proximal step, which can only lose to x by
        // rounding; refusing it would repeat the same step forever.
        const bool restart = Fz > Fx && t > 1.0;
        if (!restart) {
            x = z;
            Xx = Xz;
            Fx = Fz;
        }
        if (trace) trace->push_back(Fx);

        if (restart) {
            t = 1.0;
            v = x;
            Xv = Xx;
        } else {
            // Momentum step; the (z - x) term of the monotone update vanishes since z was accepted.
            const double b = (t - 1.0) / t_next;
            v = x + b * (x - x_prev);
            Xv = Xx + b * (Xx - Xx_prev);
            t = t_next;
        }

        if (it % gap_every == 0 || it == budget) {
            residual = y - Xx;
            corr.noalias() = X.transpose() * residual;
            cert = certify(y, x, residual, corr, lambda);
            if (converged(cert)) return {it, true};
            if (polish(X, y, lambda, x, Xx, Fx)) {
                t = 1.0;
                v = x;
                Xv = Xx;
                residual = y - Xx;
                corr.noalias() = X.transpose() * residual;
                cert = certify(y, x, residual, corr, lambda);
                if (converged(cert)) return {it, true};
            }
        }
    }
    return {budget, false};
}

}  // namespace

LassoSolution solve_lasso(const MatrixRef& X, const VectorRef& y, double lambda, const LassoOptions& options) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("solve_lasso: lambda must be positive");
    if (X.rows() != y.size()) throw InvalidArgument("solve_lasso: X and y dimensions disagree");
    if (!(options.tol > 0.0) || options.max_iter < 0) throw InvalidArgument("solve_lasso: invalid options");
    require_finite(X, "solve_lasso X");
    require_finite(y, "solve_lasso y");

    const Eigen::Index p = X.cols();
    Vector x = Vector::Zero(p);
    if (options.warm_start) {
        if (options.warm_start->size() != p) throw InvalidArgument("solve_lasso: warm start has wrong length");
        x = *options.warm_start;
    }

    LassoSolution sol;
    sol.lambda = lambda;
    std::vector<double>* trace = options.record_trace ? &sol.objective_trace : nullptr;
    auto global_certificate = [&] {
        const Vector r = y - X * x;
        const Vector corr = X.transpose() * r;
        return std::pair{certify(y, x, r, corr, lambda), corr};
    };
    auto [cert, corr] = global_certificate();
    if (trace) trace->push_back(cert.primal);
    auto finish = [&](int iterations) {
        sol.beta_hat = x;
        sol.iterations = iterations;
        sol.objective = cert.primal;
        sol.kkt_infinity = cert.kkt;
        sol.duality_gap = cert.gap;
        return sol;
    };
    // Rounding in X^t r alone; matters only when lambda is near eps ||y||.
    const double kkt_floor = static_cast<double>(X.rows()) * std::numeric_limits<double>::epsilon() * y.norm() *
                             X.colwise().norm().maxCoeff();
    auto converged = [&](const Certificate& c) {
        return c.gap <= options.tol * std::max(1.0, c.primal) && c.kkt <= lambda * (1.0 + options.kkt_tol) + kkt_floor;
    };
    if (converged(cert)) return finish(0);

    // Working set: FISTA runs on the current support plus the largest
    // stationarity violators until the certificate over all columns passes.
    // Dropped columns are zero, so the objective never increases between rounds.
    int used = 0;
    std::vector<Eigen::Index> working;
    std::vector<char> in_set(static_cast<std::size_t>(p));
    while (true) {
        working.clear();
        std::fill(in_set.begin(), in_set.end(), 0);
        for (Eigen::Index j = 0; j < p; ++j)
            if (x[j] != 0.0) {
                in_set[static_cast<std::size_t>(j)] = 1;
                working.push_back(j);
            }
        std::vector<Eigen::Index> candidates;
        for (Eigen::Index j = 0; j < p; ++j)
            if (!in_set[static_cast<std::size_t>(j)] && std::abs(corr[j]) > lambda) candidates.push_back(j);
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return std::abs(corr[a]) > std::abs(corr[b]); });
        const std::size_t grow = std::max<std::size_t>(kWorkingSetGrowth, 2 * working.size());
        if (candidates.size() > grow) candidates.resize(grow);
        working.insert(working.end(), candidates.begin(), candidates.end());
        std::sort(working.begin(), working.end());

        const Matrix Xw = X(Eigen::all, working);
        Vector xw = x(working);
        Certificate inner;
        const InnerResult res = fista(Xw, y, lambda, xw, options.max_iter - used, options, kkt_floor, trace, inner);
        used += res.iterations;
        x.setZero();
        x(working) = xw;
        std::tie(cert, corr) = global_certificate();
        if (converged(cert)) return finish(used);
        const bool stalled = candidates.empty() && res.iterations == 0;
        if (!res.converged || stalled || used >= options.max_iter) {
            finish(used);
            throw LassoNotConverged(sol);
        }
    }
}

double prediction_error(const MatrixRef& X, const VectorRef& beta, const VectorRef& beta_hat) {
    if (X.cols() != beta.size() || beta.size() != beta_hat.size())
        throw InvalidArgument("prediction_error: dimension mismatch");
    return 0.5 * (X * (beta_hat - beta)).squaredNorm();
}

}  // namespace mixlasso
