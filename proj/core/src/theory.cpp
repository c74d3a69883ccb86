#include "mixlasso/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mixlasso/stats.hpp"

namespace mixlasso {
namespace {

constexpr double kE = std::numbers::e;

// C_int after substituting eps' = 3 exp(-t^2): int_0^inf 6 t^2 exp(-t^2) dt.
double entropy_integral() {
    auto integrand = [](double t) { return 6.0 * t * t * std::exp(-t * t); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
}

AssumptionCheck lower_bound_check(double measured, double threshold) {
    AssumptionCheck c;
    c.clause_margins = {measured - threshold};
    return c;
}

void finalize(AssumptionCheck& c) {
    c.margin = c.clause_margins.empty() ? 0.0 : *std::min_element(c.clause_margins.begin(), c.clause_margins.end());
    for (double& m : c.clause_margins)
        if (!std::isfinite(m)) {
            m = 0.0;
            c.evaluable = false;
        }
    if (!std::isfinite(c.margin)) {
        c.margin = 0.0;
        c.evaluable = false;
    }
    c.pass = c.evaluable && std::all_of(c.clause_margins.begin(), c.clause_margins.end(),
                                        [](double m) { return m >= 0.0; });
}

// Lower bound on ||b||^2 of the form  numerator / denominator  (assumptions 8, 9).
AssumptionCheck energy_check(double energy, double numerator, double denominator, double sfrak) {
    AssumptionCheck c;
    if (sfrak == 0.0) {
        c.evaluable = false;
        c.note = "vacuous at sfrak = 0: threshold is 0/0";
        c.clause_margins = {0.0};
    } else if (!(denominator > 0.0)) {
        c.evaluable = false;
        c.note = "threshold infinite: denominator " + std::to_string(denominator) + " <= 0";
        c.clause_margins = {0.0};
    } else {
        c.clause_margins = {energy - numerator / denominator};
    }
    finalize(c);
    return c;
}

}  // namespace

double r_star_level(double r) noexcept { return 1.1 * r * (1.1 + 0.11 * r); }

void TheoremParams::validate() const {
    if (!(alpha > 0.0)) throw InvalidArgument("theorem params: alpha must be positive");
    if (!(r > 0.0 && r < 0.25)) throw InvalidArgument("theorem params: r must lie in (0, 1/4)");
    if (!(vartheta_star > 0.0)) throw InvalidArgument("theorem params: vartheta_star must be positive");
    if (nu < 1) throw InvalidArgument("theorem params: nu must be >= 1");
    if (c_chi && !(*c_chi > 0.0)) throw InvalidArgument("theorem params: c_chi must be positive");
    if (!(dev_C > 0.0) || !(dev_c > 0.0)) throw InvalidArgument("theorem params: deviation constants must be positive");
    if (rho_C && !(*rho_C >= 1.0)) throw InvalidArgument("theorem params: rho_C must be >= 1");
}

double log_chi_tail_constant(int n, double exponent, double x_low) {
    if (n < 1) throw InvalidArgument("log_chi_tail_constant: n must be >= 1");
    constexpr int kPoints = 1001;
    const double lo = std::log(x_low);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kPoints; ++i) {
        const double lx = i == kPoints - 1 ? 0.0 : lo + (0.0 - lo) * i / (kPoints - 1);
        const double x = std::exp(lx);
        best = std::max(best, log_chi_square_cdf(n, n * x) - exponent * lx);
    }
    return best;
}

TheoremConstants compute_constants(const MixtureSpec& spec, const TheoremParams& params, int s) {
    params.validate();
    if (spec.p < 2) throw InvalidArgument("compute_constants: p must be >= 2");
    if (s < 1) throw InvalidArgument("compute_constants: s must be >= 1");
    if (spec.n < 1) throw InvalidArgument("compute_constants: n must be >= 1");

    const double alpha = params.alpha;
    const double r = params.r;
    const double c = params.dev_c;
    const double n = spec.n;
    const double sfrak = spec.sigma_frak;
    const double L = std::log(static_cast<double>(spec.p));

    TheoremConstants k;
    k.s = s;
    k.s_star = spec.s_star;
    k.log_p = L;
    k.C_mu = r / (1.0 + alpha);
    k.C_spar = r * r / ((1.0 + alpha) * kE * kE);
    k.C_col = 0.5 * (std::sqrt(2.0) / std::sqrt((1.0 - r) * (1.0 + alpha)) - (1.0 + r));
    k.C_int = entropy_integral();
    k.C_int_star = k.C_int;

    k.log_c_chi = params.c_chi ? std::log(*params.c_chi) : log_chi_tail_constant(spec.n, n);
    const double log_q = (std::log(alpha * (1.0 - 1.0 / kE) / params.vartheta_star) - k.log_c_chi -
                          (params.nu - 1) * std::log(L)) / n;
    k.tail_factor = std::exp(log_q);
    k.tail_radius = sfrak * std::sqrt(n * k.tail_factor);

    k.r_max_excess = sfrak * (std::sqrt(n) + std::sqrt(alpha / c * L + std::log(static_cast<double>(s)) / c));
    k.r_max = 1.0 + k.r_max_excess;
    k.mu_max = 0.5 * sfrak * (std::sqrt(n) + std::sqrt(static_cast<double>(s)) + std::sqrt(2.0 * alpha * L));
    k.sigma_max_sq = 0.5 * std::sqrt(static_cast<double>(s)) * sfrak * sfrak;

    if (!(k.tail_radius < 1.0))
        throw AssumptionViolated(7, "sfrak sqrt(n Q) = " + std::to_string(k.tail_radius) + " >= 1");
    const double shrink = 1.0 - k.tail_radius;
    k.r_star_max = 1.0 / shrink;
    k.K_n_sstar_sq = alpha * n * L * k.tail_factor;
    k.K_n_sstar = std::sqrt(k.K_n_sstar_sq);
    k.mu_star_max = sfrak * k.K_n_sstar;
    k.sigma_star_max_sq = k.tail_factor / shrink * std::sqrt(static_cast<double>(spec.s_star)) * sfrak * sfrak;

    k.r_star_coeff = r_star_level(r);
    const double sK = sfrak * k.K_n_sstar;
    const double upper = ((1.0 + r) + (1.0 + r) * sK + sK * sK) / (shrink * shrink) - 1.0;
    const double lower = 1.0 - ((1.0 - r) / ((1.0 + k.tail_radius) * (1.0 + k.tail_radius)) -
                                ((1.0 + r) * sK + sK * sK) / (shrink * shrink));
    k.r_star_eq = std::max(upper, lower);

    k.C_s_n_p = sfrak * std::sqrt(L) * (std::sqrt(n) + std::sqrt((alpha + 1.0) / c * L));
    k.C_s_n_p_cap = std::min(0.1 * r / std::sqrt(alpha * k.tail_factor), 0.5 * std::sqrt(L));

    k.rho_C = params.rho_C.value_or(kDefaultRhoC);
    k.delta = delta_lower_bound(k, spec, params, spec.s_star, k.rho_C);
    k.delta_lower = k.delta.total;
    return k;
}

DeltaTerms delta_lower_bound(const TheoremConstants& k, const MixtureSpec& spec, const TheoremParams& params,
                             int s_star, double rho_C) {
    const double alpha = params.alpha;
    const double L = k.log_p;
    const double n = spec.n;
    const double sfrak = spec.sigma_frak;
    const double spread = std::sqrt(alpha * L + std::log(2.0 * n + 2.0));
    const double root_s_rho = std::sqrt(s_star * rho_C);
    const double root_rho = std::sqrt(rho_C);

    DeltaTerms d;
    d.terms[0] = 4.0 * k.r_max_excess * (1.0 + 8.0 * std::sqrt(2.0) * spread * root_s_rho);
    d.terms[1] = (12.0 * k.C_int * sfrak * std::sqrt(n) * k.r_max + alpha * L * k.mu_max) * root_s_rho;
    d.terms[2] = 4.0 * k.tail_radius * (1.0 + 2.0 * std::sqrt(2.0) * root_rho * spread);
    d.terms[3] = (24.0 * k.r_star_max * sfrak * std::sqrt(k.tail_factor) * k.C_int_star + k.mu_star_max * alpha * L) *
                 root_rho;
    d.total = d.terms[0] + d.terms[1] + d.terms[2] + d.terms[3];
    return d;
}

double theorem_rhs(int s_star, double r_star_coeff, double lambda, double delta, double center_energy,
                   double signal_energy) {
    return s_star * 1.5 * r_star_coeff * lambda *
               (1.5 * lambda + std::sqrt(1.0 + r_star_coeff) * delta * center_energy) +
           0.5 * delta * delta * signal_energy * signal_energy;
}

double center_energy(const CenterMatrix& centers, const DesignInstance& instance, const GroundTruth& truth) {
    Vector acc = Vector::Zero(centers.n());
    for (int j : truth.support) acc += centers.centers().col(instance.labels[static_cast<std::size_t>(j)]) * truth.beta[j];
    return acc.norm();
}

bool AssumptionReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.pass; });
}

AssumptionReport check_assumptions(const MixtureSpec& spec, const TheoremParams& params, const CenterMatrix& centers,
                                   const DesignInstance& instance, const GroundTruth& truth, const ProxyVector& proxy,
                                   bool signs_uniform) {
    AssumptionReport rep;
    auto& a = rep.checks;
    const double alpha = params.alpha;
    const double r = params.r;
    const double c = params.dev_c;
    const double n = spec.n;
    const double p = spec.p;
    const double L = std::log(p);
    const double sfrak = spec.sigma_frak;

    // 1: size of p.
    {
        const double dbl_exp = std::exp(std::exp(2.0 - std::log(alpha)));
        const double log_floor = std::max(0.2 * r * (1.0 + 1.1 * r + 0.11 * r * r) / (0.1 * (1.1 * r + 0.11 * r * r)),
                                          r_star_level(r) / alpha);
        a[0].clause_margins = {p - spec.K, p - dbl_exp, L - log_floor};
        finalize(a[0]);
    }

    TheoremConstants k;
    bool have_constants = true;
    try {
        k = compute_constants(spec, params, std::max(truth.s(), 1));
    } catch (const AssumptionViolated& e) {
        have_constants = false;
    }
    const double C_mu = r / (1.0 + alpha);
    const double C_spar = r * r / ((1.0 + alpha) * kE * kE);

    // 2: coherence of the centers.
    a[1].clause_margins = {C_mu / L - centers.coherence_mu()};
    finalize(a[1]);

    // 3: representatives' clusters are large enough.
    {
        double smallest = std::numeric_limits<double>::infinity();
        for (const auto& [cluster, j] : proxy.representative_of)
            smallest = std::min(smallest, static_cast<double>(instance.counts[static_cast<std::size_t>(cluster)]));
        if (proxy.representative_of.empty()) smallest = 0.0;
        a[2] = lower_bound_check(smallest, params.vartheta_star * std::pow(L, params.nu));
        finalize(a[2]);
    }

    // 4: sparsity of the active set.
    {
        const double bound = spec.K / L * C_spar / (centers.op_norm() * centers.op_norm());
        a[3].clause_margins = {bound - proxy.s_star()};
        finalize(a[3]);
    }

    // 5: sample size.
    a[4] = lower_bound_check(n, (alpha + 1.0) / c * L);
    finalize(a[4]);

    // 6: column constant, two clauses.
    {
        const double C_col = 0.5 * (std::sqrt(2.0) / std::sqrt((1.0 - r) * (1.0 + alpha)) - (1.0 + r));
        a[5].clause_margins = {C_col - kE * kE * (alpha + 1.0) * std::max(std::sqrt(C_spar), C_mu)};
        if (have_constants) {
            const double denom = (alpha * L - std::log(2.0)) * 2.0;
            const double rhs = 0.5 * std::sqrt(L * (1.0 - k.r_star_eq) * (1.0 - k.r_star_eq) / denom);
            a[5].clause_margins.push_back(rhs - (C_col + (1.0 + 1.1 * r) * k.C_s_n_p));
        } else {
            a[5].clause_margins.push_back(std::numeric_limits<double>::quiet_NaN());
            a[5].note = "r* undefined (sfrak sqrt(n Q) >= 1)";
        }
        finalize(a[5]);
    }

    // 7: small mixture variance, two clauses plus the admissible range of C_{s,n,p}.
    {
        const double excess = sfrak * (std::sqrt(n) + std::sqrt(alpha / c * L + std::log(std::max(truth.s(), 1)) / c));
        a[6].clause_margins = {0.5 - excess};
        if (have_constants) {
            a[6].clause_margins.push_back(k.C_s_n_p_cap - k.C_s_n_p);
            a[6].clause_margins.push_back(1.0 - k.tail_radius);
        } else {
            a[6].clause_margins.push_back(-1.0);
            a[6].note = "sfrak sqrt(n Q) >= 1";
        }
        finalize(a[6]);
    }

    // 8 and 9: signal strength of beta_T and beta*_{T*}.
    const double beta_energy = truth.beta.squaredNorm();
    const double beta_star_energy = proxy.beta_star.squaredNorm();
    if (have_constants) {
        const double num8 = 2.0 * alpha * L * n * k.sigma_max_sq;
        const double den8 = 4.0 * alpha * alpha / 9.0 * k.mu_max * k.mu_max * L * L -
                            12.0 * k.C_int * k.mu_max * k.r_max * sfrak * std::sqrt(n);
        a[7] = energy_check(beta_energy, num8, den8, sfrak);
        const double num9 = 2.0 * alpha * L * n * k.sigma_star_max_sq;
        const double den9 = 4.0 * alpha * alpha / 9.0 * k.mu_star_max * k.mu_star_max * L * L -
                            24.0 * k.C_int_star * k.mu_star_max * k.r_star_max * sfrak * std::sqrt(k.tail_factor);
        a[8] = energy_check(beta_star_energy, num9, den9, sfrak);
    } else {
        for (int i : {7, 8}) {
            a[i].clause_margins = {0.0};
            a[i].evaluable = false;
            a[i].note = "constants undefined (sfrak sqrt(n Q) >= 1)";
            finalize(a[i]);
        }
    }

    // 10: random support and uniform signs hold by construction of the truth sampler.
    a[9].clause_margins = {0.0};
    a[9].note = signs_uniform ? "uniform signs by construction" : "signs not randomized";
    finalize(a[9]);
    a[9].pass = signs_uniform;
    return rep;
}

DecompositionNorms decomposition_norms(const CenterMatrix& centers, const DesignInstance& instance,
                                       const GroundTruth& truth, const ProxyVector& proxy) {
    const Matrix& C = centers.centers();
    const Eigen::Index n = C.rows();
    Vector A = Vector::Zero(n), B = Vector::Zero(n), As = Vector::Zero(n), Bs = Vector::Zero(n);
    auto accumulate = [&](int j, double coef, Vector& a, Vector& b) {
        const int k = instance.labels[static_cast<std::size_t>(j)];
        const double inv = 1.0 / instance.X_o.col(j).norm();
        a += (inv - 1.0) * coef * C.col(k);
        b += inv * coef * instance.E.col(j);
    };
    for (int j : truth.support) accumulate(j, truth.beta[j], A, B);
    for (int j : proxy.support_star) accumulate(j, proxy.beta_star[j], As, Bs);

    DecompositionNorms d;
    d.A = A.norm();
    d.B = B.norm();
    d.A_star = As.norm();
    d.B_star = Bs.norm();
    d.step1 = ((A + B) - (As + Bs)).norm();
    return d;
}

ConditionReport check_events(const CenterMatrix& centers, const DesignInstance& instance, const GroundTruth& truth,
                             const ProxyVector& proxy, double lambda, const TheoremParams& params) {
    ConditionReport rep;
    const double L = std::log(static_cast<double>(instance.p()));
    const double r_star = r_star_level(params.r);

    // I
    const Matrix CK = select_columns(centers.centers(), instance.active_set);
    rep.center_gram_dev = gram_deviation(CK);
    try {
        rep.rho_measured = spectral_norm(inverse_spd(CK.transpose() * CK)).operator_norm;
    } catch (const NotPositiveDefinite&) {
        rep.rho_measured = 0.0;
    }

    // II
    const Matrix XT = select_columns(instance.X, proxy.support_star);
    rep.design_gram_dev = gram_deviation(XT);

    // III
    rep.noise_corr_inf = (instance.X.transpose() * truth.z).lpNorm<Eigen::Infinity>();

    // IV: ||X_{T*c}^t X_{T*} G^{-1} X_{T*}^t z||_inf + lambda ||X_{T*c}^t X_{T*} G^{-1} sgn(beta*_{T*})||_inf.
    {
        const Matrix G = XT.transpose() * XT;
        Vector signs(XT.cols());
        for (Eigen::Index i = 0; i < XT.cols(); ++i) {
            const double b = proxy.beta_star[proxy.support_star[static_cast<std::size_t>(i)]];
            signs[i] = (b > 0.0) - (b < 0.0);
        }
        try {
            const Vector noise_dir = XT * solve_gram_system(G, XT.transpose() * truth.z);
            const Vector sign_dir = XT * solve_gram_system(G, signs);
            std::vector<char> in_support(static_cast<std::size_t>(instance.p()), 0);
            for (int j : proxy.support_star) in_support[static_cast<std::size_t>(j)] = 1;
            const Vector noise_corr = instance.X.transpose() * noise_dir;
            const Vector sign_corr = instance.X.transpose() * sign_dir;
            double noise_max = 0.0, sign_max = 0.0;
            for (Eigen::Index j = 0; j < instance.X.cols(); ++j) {
                if (in_support[static_cast<std::size_t>(j)]) continue;
                noise_max = std::max(noise_max, std::abs(noise_corr[j]));
                sign_max = std::max(sign_max, std::abs(sign_corr[j]));
            }
            rep.comp_size = noise_max + lambda * sign_max;
        } catch (const NotPositiveDefinite&) {
            rep.iv_singular = true;
        }
    }

    rep.thresholds = {0.5, r_star, truth.sigma * std::sqrt(2.0 * params.alpha * L),
                      truth.sigma * std::sqrt(1.0 + r_star) + 0.5 * lambda};
    rep.event_flags = {rep.center_gram_dev < rep.thresholds[0], rep.design_gram_dev < rep.thresholds[1],
                       rep.noise_corr_inf < rep.thresholds[2],
                       !rep.iv_singular && rep.comp_size <= rep.thresholds[3]};
    rep.decomposition = decomposition_norms(centers, instance, truth, proxy);
    return rep;
}

}  // namespace mixlasso
