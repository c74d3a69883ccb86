#pragma once

// l1-penalized least squares,
//
//     beta_hat = argmin_b  1/2 ||y - X b||_2^2 + lambda ||b||_1,
//
// solved by monotone FISTA with backtracking and function-value restarts.
// Termination is certified by the duality gap of the rescaled-residual dual
// point together with the stationarity condition ||X^t (y - X b)||_inf <= lambda.

#include <optional>
#include <vector>

#include "mixlasso/linalg.hpp"

namespace mixlasso {

struct LassoOptions {
    double tol = 1e-9;        // relative duality gap: gap <= tol * max(1, objective)
    int max_iter = 50000;
    double kkt_tol = 1e-6;    // ||X^t r||_inf <= lambda * (1 + kkt_tol), plus a rounding floor
    int gap_every = 5;        // certificate evaluated every gap_every iterations
    std::optional<Vector> warm_start;
    bool record_trace = false;
};

struct LassoSolution {
    Vector beta_hat;
    double lambda = 0.0;
    int iterations = 0;
    double objective = 0.0;
    double kkt_infinity = 0.0;
    double duality_gap = 0.0;
    double lipschitz = 0.0;               // final step-size constant
    std::vector<double> objective_trace;  // F(x_k), when requested
};

class LassoNotConverged : public Error {
public:
    explicit LassoNotConverged(LassoSolution last)
        : Error("lasso: no certified solution after " + std::to_string(last.iterations) +
                " iterations (gap " + std::to_string(last.duality_gap) + ")"),
          last_(std::move(last)) {}

    const LassoSolution& last() const noexcept { return last_; }

private:
    LassoSolution last_;
};

/// 2 sigma sqrt(2 alpha log p). `p` is real so the formula can be probed at p = e.
double default_lambda(double sigma, double alpha, double p);

double soft_threshold(double value, double threshold) noexcept;

/// 1/2 ||y - X b||^2 + lambda ||b||_1.
double lasso_objective(const MatrixRef& X, const VectorRef& y, const VectorRef& beta, double lambda);

/// Primal-dual gap at `beta` using the dual point r * min(1, lambda / ||X^t r||_inf).
double lasso_duality_gap(const MatrixRef& X, const VectorRef& y, const VectorRef& beta, double lambda);

LassoSolution solve_lasso(const MatrixRef& X, const VectorRef& y, double lambda, const LassoOptions& options = {});

/// 1/2 ||X (beta_hat - beta)||_2^2.
double prediction_error(const MatrixRef& X, const VectorRef& beta, const VectorRef& beta_hat);

}  // namespace mixlasso
