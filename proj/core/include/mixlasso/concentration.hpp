#pragma once

// Monte Carlo sanity checks for the concentration inequalities the
// prediction bound relies on: the Gaussian matrix norm bound, the chi-square
// lower tail, the scalar chi deviation bound, and matrix Hoeffding/Chernoff.

#include <cstdint>
#include <vector>

#include "mixlasso/rng.hpp"
#include "mixlasso/theory.hpp"

namespace mixlasso {

struct ConcentrationConfig {
    int gauss_rows = 20;
    int gauss_cols = 20;
    double gauss_u = 3.0;
    int chi_dim = 10;
    double chi_u2 = 1.0;
    long chi_samples = 1'000'000;
    std::vector<double> chi_grid = {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0};  // x = u^2 / n
    std::vector<double> deviation_grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    int hoeffding_dim = 5;
    int hoeffding_terms = 20;
    int chernoff_dim = 5;
    int chernoff_terms = 50;
    double chernoff_ratio = 1.2;  // r = ratio * e * mu_max
};

struct GaussianNormCheck {
    int rows = 0, cols = 0;
    double u = 0.0;
    long trials = 0;
    long upper_exceed = 0;  // sigma_max > sqrt(n) + sqrt(m) + u
    long lower_exceed = 0;  // sigma_min < sqrt(n) - sqrt(m) - u
    double frequency = 0.0;
    double bound = 0.0;     // 2 exp(-u^2 / 2)
};

struct ChiTailPoint {
    double x = 0.0;          // u^2 / n
    double empirical = 0.0;
    double exact = 0.0;
};

struct ChiTailCheck {
    int dim = 0;
    double u2 = 0.0;
    long samples = 0;
    long count = 0;
    double empirical = 0.0;
    double exact = 0.0;
    double relative_error = 0.0;
    std::vector<ChiTailPoint> grid;
    // Smallest constants over x in [0.01, 1] from the exact distribution.
    double log_c_exponent_n = 0.0;       // P <= C (u^2/n)^n
    double log_c_exponent_half_n = 0.0;  // P <= C (u^2/n)^(n/2)
    // Same fits restricted to grid points with a nonzero empirical count.
    double empirical_c_exponent_n = 0.0;
    double empirical_c_exponent_half_n = 0.0;
};

struct DeviationCheck {
    double C = 0.0, c = 0.0;
    std::vector<double> u;
    std::vector<double> empirical;
    std::vector<double> bound;
    bool holds = true;
    double worst_ratio = 0.0;  // max empirical / bound
};

struct MatrixTailCheck {
    int dim = 0;
    int terms = 0;
    double threshold = 0.0;
    long trials = 0;
    double empirical = 0.0;
    double bound = 0.0;
};

struct ConcentrationReport {
    GaussianNormCheck gaussian;
    ChiTailCheck chi;
    DeviationCheck deviation;
    MatrixTailCheck hoeffding;
    MatrixTailCheck chernoff;
};

/// Runs every check. `trials` (>= 100) drives the Gaussian, Hoeffding and
/// Chernoff checks; the chi-square checks use config.chi_samples.
ConcentrationReport concentration_suite(const TheoremParams& params, Rng& rng, long trials,
                                        const ConcentrationConfig& config = {});

}  // namespace mixlasso
