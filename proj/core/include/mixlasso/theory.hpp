#pragma once

// Constants, assumptions and probabilistic events behind the prediction bound
// for the LASSO under the Gaussian-mixture design.
//
// Notation used in names below:
//   L            log p
//   tail_factor  Q = (alpha (1 - 1/e) / (vartheta* C_chi))^(1/n) * (1 / L^(nu-1))^(1/n)
//   tail_radius  sfrak * sqrt(n Q)
//   r_star_coeff r_* = 1.1 r (1.1 + 0.11 r), the Gram-deviation level on T*
//   r_star_eq    the larger Gram-deviation level r* used by the column assumption
//
// `s` is the size of the true support T and `s_star` the number of active
// clusters (= |T*|); they are separate inputs everywhere.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mixlasso/linalg.hpp"
#include "mixlasso/mixture.hpp"
#include "mixlasso/proxy.hpp"

namespace mixlasso {

struct TheoremParams {
    double alpha = 1.0;
    double r = 0.2;                 // open interval (0, 1/4)
    double vartheta_star = 1.0;
    int nu = 2;
    std::optional<double> c_chi;    // unset: smallest constant from the chi-square lower tail
    double dev_C = 2.0;             // scalar deviation bound P(| ||G||/sfrak - sqrt n | >= u) <= C exp(-c u^2)
    double dev_c = 0.5;
    std::optional<double> rho_C;    // unset: measured per trial as ||(C_K^t C_K)^{-1}||

    void validate() const;
};

/// rho_C used where no trial measurement is available.
inline constexpr double kDefaultRhoC = 2.0;

/// r_* = 1.1 r (1.1 + 0.11 r).
double r_star_level(double r) noexcept;

/// log of the smallest C with P(chi^2_n <= n x) <= C x^exponent for x on a
/// log-spaced grid over [x_low, 1] (1001 points, endpoints included).
double log_chi_tail_constant(int n, double exponent, double x_low = 0.01);

struct DeltaTerms {
    std::array<double, 4> terms{};  // the four summands, in order
    double total = 0.0;
};

struct TheoremConstants {
    double log_p = 0.0;
    double C_mu = 0.0;
    double C_spar = 0.0;
    double C_col = 0.0;
    double C_int = 0.0;
    double C_int_star = 0.0;  // same integral as C_int
    double log_c_chi = 0.0;
    double tail_factor = 0.0;
    double tail_radius = 0.0;
    double r_max_excess = 0.0;  // sfrak (sqrt n + sqrt(alpha/c L + log(s)/c))
    double r_max = 0.0;
    double mu_max = 0.0;
    double sigma_max_sq = 0.0;
    double r_star_max = 0.0;
    double K_n_sstar_sq = 0.0;
    double K_n_sstar = 0.0;
    double mu_star_max = 0.0;
    double sigma_star_max_sq = 0.0;
    double r_star_coeff = 0.0;
    double r_star_eq = 0.0;
    double C_s_n_p = 0.0;      // smallest admissible value: sfrak sqrt(L) (sqrt n + sqrt((alpha+1)/c L))
    double C_s_n_p_cap = 0.0;  // min{0.1 r / sqrt(alpha Q), sqrt(L)/2}
    double rho_C = kDefaultRhoC;
    DeltaTerms delta;
    double delta_lower = 0.0;
    int s = 0;
    int s_star = 0;
};

/// Evaluates every named constant. Throws AssumptionViolated(7) when
/// sfrak sqrt(n Q) >= 1 (the r*_max and sigma*_max denominators vanish).
/// The delta lower bound is evaluated with params.rho_C (or kDefaultRhoC).
TheoremConstants compute_constants(const MixtureSpec& spec, const TheoremParams& params, int s);

/// The four-term lower bound on delta for a given rho_C.
DeltaTerms delta_lower_bound(const TheoremConstants& constants, const MixtureSpec& spec, const TheoremParams& params,
                             int s_star, double rho_C);

/// s* (3/2) r_* lambda ((3/2) lambda + sqrt(1 + r_*) delta ||C_T beta_T||) + (1/2) delta^2 ||X beta||^2.
double theorem_rhs(int s_star, double r_star_coeff, double lambda, double delta, double center_energy,
                   double signal_energy);

/// ||C_{K_T} beta_T||_2 = || sum_{j in T} C[:, k_j] beta_j ||_2.
double center_energy(const CenterMatrix& centers, const DesignInstance& instance, const GroundTruth& truth);

struct AssumptionCheck {
    bool pass = false;
    double margin = 0.0;               // min over clauses; >= 0 iff satisfied
    std::vector<double> clause_margins;
    bool evaluable = true;             // false when a threshold is undefined or infinite
    std::string note;
};

struct AssumptionReport {
    std::array<AssumptionCheck, 10> checks{};  // checks[i] is assumption i + 1
    bool all_pass() const;
};

/// Evaluates the ten assumptions. Margins are oriented so that a nonnegative
/// value means "satisfied". Never throws on a failed assumption.
AssumptionReport check_assumptions(const MixtureSpec& spec, const TheoremParams& params, const CenterMatrix& centers,
                                   const DesignInstance& instance, const GroundTruth& truth, const ProxyVector& proxy,
                                   bool signs_uniform = true);

struct DecompositionNorms {
    double A = 0.0;
    double B = 0.0;
    double A_star = 0.0;
    double B_star = 0.0;
    double step1 = 0.0;  // ||E~_T beta_T - E~*_{T*} beta*_{T*}||_2

    double sum() const { return A + B + A_star + B_star; }
};

DecompositionNorms decomposition_norms(const CenterMatrix& centers, const DesignInstance& instance,
                                       const GroundTruth& truth, const ProxyVector& proxy);

struct ConditionReport {
    double center_gram_dev = 0.0;  // I:   ||C_K^t C_K - I||
    double design_gram_dev = 0.0;  // II:  ||X_{T*}^t X_{T*} - I||
    double noise_corr_inf = 0.0;   // III: ||X^t z||_inf
    double comp_size = 0.0;        // IV:  left-hand side of the complementarity bound
    std::array<double, 4> thresholds{};
    std::array<bool, 4> event_flags{};  // true: measured quantity below threshold (event holds)
    bool iv_singular = false;           // Gram of X_{T*} not invertible; IV reported as failed
    double rho_measured = 0.0;          // ||(C_K^t C_K)^{-1}||, 0 if singular
    DecompositionNorms decomposition;
};

ConditionReport check_events(const CenterMatrix& centers, const DesignInstance& instance, const GroundTruth& truth,
                             const ProxyVector& proxy, double lambda, const TheoremParams& params);

}  // namespace mixlasso
