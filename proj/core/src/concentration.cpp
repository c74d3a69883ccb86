#include "mixlasso/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mixlasso/linalg.hpp"
#include "mixlasso/stats.hpp"

namespace mixlasso {
namespace {

GaussianNormCheck gaussian_norm(const ConcentrationConfig& cfg, Rng& rng, long trials) {
    GaussianNormCheck g;
    g.rows = cfg.gauss_rows;
    g.cols = cfg.gauss_cols;
    g.u = cfg.gauss_u;
    g.trials = trials;
    const double upper = std::sqrt(g.rows) + std::sqrt(g.cols) + g.u;
    const double lower = std::sqrt(g.rows) - std::sqrt(g.cols) - g.u;
    SpectralOptions opts;
    opts.min_singular = lower > 0.0;
    Matrix G(g.rows, g.cols);
    for (long t = 0; t < trials; ++t) {
        for (Eigen::Index j = 0; j < G.cols(); ++j)
            for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = rng.normal();
        const SpectralReport rep = spectral_norm(G, opts);
        if (rep.operator_norm > upper) ++g.upper_exceed;
        if (opts.min_singular && rep.min_singular < lower) ++g.lower_exceed;
    }
    g.frequency = static_cast<double>(g.upper_exceed) / static_cast<double>(trials);
    g.bound = 2.0 * std::exp(-g.u * g.u / 2.0);
    return g;
}

void chi_checks(const TheoremParams& params, const ConcentrationConfig& cfg, Rng& rng, ConcentrationReport& out) {
    ChiTailCheck& chi = out.chi;
    DeviationCheck& dev = out.deviation;
    chi.dim = cfg.chi_dim;
    chi.u2 = cfg.chi_u2;
    chi.samples = cfg.chi_samples;
    const double n = cfg.chi_dim;

    std::vector<long> grid_counts(cfg.chi_grid.size(), 0);
    std::vector<long> dev_counts(cfg.deviation_grid.size(), 0);
    for (long s = 0; s < cfg.chi_samples; ++s) {
        double sq = 0.0;
        for (int i = 0; i < cfg.chi_dim; ++i) {
            const double g = rng.normal();
            sq += g * g;
        }
        if (sq <= chi.u2) ++chi.count;
        for (std::size_t i = 0; i < cfg.chi_grid.size(); ++i)
            if (sq <= n * cfg.chi_grid[i]) ++grid_counts[i];
        const double gap = std::abs(std::sqrt(sq) - std::sqrt(n));
        for (std::size_t i = 0; i < cfg.deviation_grid.size(); ++i)
            if (gap >= cfg.deviation_grid[i]) ++dev_counts[i];
    }
    const double total = static_cast<double>(cfg.chi_samples);
    chi.empirical = chi.count / total;
    chi.exact = chi_square_cdf(n, chi.u2);
    chi.relative_error = std::abs(chi.empirical - chi.exact) / chi.exact;

    chi.log_c_exponent_n = log_chi_tail_constant(cfg.chi_dim, n);
    chi.log_c_exponent_half_n = log_chi_tail_constant(cfg.chi_dim, n / 2.0);
    chi.empirical_c_exponent_n = 0.0;
    chi.empirical_c_exponent_half_n = 0.0;
    for (std::size_t i = 0; i < cfg.chi_grid.size(); ++i) {
        const double x = cfg.chi_grid[i];
        ChiTailPoint pt{x, grid_counts[i] / total, chi_square_cdf(n, n * x)};
        chi.grid.push_back(pt);
        if (grid_counts[i] > 0) {
            chi.empirical_c_exponent_n = std::max(chi.empirical_c_exponent_n, pt.empirical / std::pow(x, n));
            chi.empirical_c_exponent_half_n =
                std::max(chi.empirical_c_exponent_half_n, pt.empirical / std::pow(x, n / 2.0));
        }
    }

    dev.C = params.dev_C;
    dev.c = params.dev_c;
    dev.u = cfg.deviation_grid;
    for (std::size_t i = 0; i < cfg.deviation_grid.size(); ++i) {
        const double u = cfg.deviation_grid[i];
        const double emp = dev_counts[i] / total;
        const double bnd = dev.C * std::exp(-dev.c * u * u);
        dev.empirical.push_back(emp);
        dev.bound.push_back(bnd);
        dev.holds = dev.holds && emp <= bnd;
        dev.worst_ratio = std::max(dev.worst_ratio, emp / bnd);
    }
}

Matrix random_symmetric_unit(int d, Rng& rng) {
    Matrix a(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i <= j; ++i) a(i, j) = a(j, i) = rng.normal();
    const Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return a / es.eigenvalues().cwiseAbs().maxCoeff();
}

// Rademacher series sum_j eps_j A_j with fixed self-adjoint A_j, ||A_j|| = 1.
MatrixTailCheck hoeffding(const ConcentrationConfig& cfg, Rng& rng, long trials) {
    MatrixTailCheck h;
    h.dim = cfg.hoeffding_dim;
    h.terms = cfg.hoeffding_terms;
    h.trials = trials;
    std::vector<Matrix> coefs;
    Matrix variance = Matrix::Zero(h.dim, h.dim);
    for (int j = 0; j < h.terms; ++j) {
        coefs.push_back(random_symmetric_unit(h.dim, rng));
        variance += coefs.back() * coefs.back();
    }
    const double sigma2 = Eigen::SelfAdjointEigenSolver<Matrix>(variance, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    // Threshold where d exp(-t^2 / (8 sigma^2)) = 0.1.
    h.threshold = std::sqrt(8.0 * sigma2 * std::log(10.0 * h.dim));
    h.bound = h.dim * std::exp(-h.threshold * h.threshold / (8.0 * sigma2));
    long hits = 0;
    Matrix sum(h.dim, h.dim);
    for (long t = 0; t < trials; ++t) {
        sum.setZero();
        for (const auto& a : coefs) sum += rng.sign() * a;
        const double top =
            Eigen::SelfAdjointEigenSolver<Matrix>(sum, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
        if (top >= h.threshold) ++hits;
    }
    h.empirical = static_cast<double>(hits) / static_cast<double>(trials);
    return h;
}

// Sum of rank-one projectors onto uniform unit vectors: B = 1, E S = (terms / d) I.
MatrixTailCheck chernoff(const ConcentrationConfig& cfg, Rng& rng, long trials) {
    MatrixTailCheck c;
    c.dim = cfg.chernoff_dim;
    c.terms = cfg.chernoff_terms;
    c.trials = trials;
    const double mu_max = static_cast<double>(c.terms) / c.dim;
    c.threshold = cfg.chernoff_ratio * std::numbers::e * mu_max;
    c.bound = c.dim * std::pow(std::numbers::e * mu_max / c.threshold, c.threshold);
    long hits = 0;
    Matrix sum(c.dim, c.dim);
    Vector u(c.dim);
    for (long t = 0; t < trials; ++t) {
        sum.setZero();
        for (int j = 0; j < c.terms; ++j) {
            for (int i = 0; i < c.dim; ++i) u[i] = rng.normal();
            u.normalize();
            sum.noalias() += u * u.transpose();
        }
        const double top =
            Eigen::SelfAdjointEigenSolver<Matrix>(sum, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
        if (top >= c.threshold) ++hits;
    }
    c.empirical = static_cast<double>(hits) / static_cast<double>(trials);
    return c;
}

}  // namespace

ConcentrationReport concentration_suite(const TheoremParams& params, Rng& rng, long trials,
                                        const ConcentrationConfig& config) {
    if (trials < 100) throw InvalidArgument("concentration_suite: need at least 100 trials");
    if (config.chi_samples < 1) throw InvalidArgument("concentration_suite: chi_samples must be positive");
    params.validate();
    ConcentrationReport rep;
    rep.gaussian = gaussian_norm(config, rng, trials);
    chi_checks(params, config, rng, rep);
    rep.hoeffding = hoeffding(config, rng, trials);
    rep.chernoff = chernoff(config, rng, trials);
    return rep;
}

}  // namespace mixlasso
