#pragma once

// Second, independent coding of the bound's constants. Written straight from
// the formulas with pow() instead of the log-space evaluation in theory.cpp,
// and with C_chi always supplied explicitly. Nothing here calls the library.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct Inputs {
    double n = 200, p = 2000, s = 8, s_star = 8;
    double sfrak = 1e-3;
    double alpha = 1.0, r = 0.2, theta = 1.0, nu = 2.0;
    double c_chi = 1.0;
    double c_dev = 0.5;
    double rho = 2.0;
};

struct Values {
    double C_mu, C_spar, C_col, C_int;
    double Q, a;
    double r_max, mu_max, sigma_max_sq;
    double r_star_max, K, mu_star_max, sigma_star_max_sq;
    double r_low, r_star;
    double C_snp, C_snp_cap;
    double d1, d2, d3, d4, delta;
    double a8_threshold, a9_threshold;
};

// int_0^3 sqrt(log(3/e)) de; with e = 3 exp(-t) it is 3 Gamma(3/2).
inline double entropy_integral_closed() { return 3.0 * std::tgamma(1.5); }

inline Values evaluate(const Inputs& in) {
    const double e = std::exp(1.0);
    const double L = std::log(in.p);
    Values v{};
    v.C_mu = in.r / (1 + in.alpha);
    v.C_spar = std::pow(in.r, 2) / ((1 + in.alpha) * std::pow(e, 2));
    v.C_col = (std::sqrt(2.0 / ((1 - in.r) * (1 + in.alpha))) - 1 - in.r) / 2;
    v.C_int = entropy_integral_closed();

    v.Q = std::pow(in.alpha * (1 - 1 / e) / (in.theta * in.c_chi), 1 / in.n) *
          std::pow(1 / std::pow(L, in.nu - 1), 1 / in.n);
    v.a = in.sfrak * std::sqrt(in.n * v.Q);

    v.r_max = 1 + in.sfrak * (std::sqrt(in.n) + std::sqrt(in.alpha * L / in.c_dev + std::log(in.s) / in.c_dev));
    v.mu_max = in.sfrak / 2 * (std::sqrt(in.n) + std::sqrt(in.s) + std::sqrt(2 * in.alpha * L));
    v.sigma_max_sq = std::sqrt(in.s) * in.sfrak * in.sfrak / 2;

    v.r_star_max = 1 / (1 - v.a);
    v.K = std::sqrt(in.alpha * in.n * L * v.Q);
    v.mu_star_max = in.sfrak * v.K;
    v.sigma_star_max_sq = v.Q * std::sqrt(in.s_star) * in.sfrak * in.sfrak / (1 - v.a);

    v.r_low = 1.1 * in.r * (1.1 + 0.11 * in.r);
    const double sk = in.sfrak * v.K;
    const double first = (1 + in.r + (1 + in.r) * sk + sk * sk) / std::pow(1 - v.a, 2) - 1;
    const double second = 1 - (1 - in.r) / std::pow(1 + v.a, 2) + ((1 + in.r) * sk + sk * sk) / std::pow(1 - v.a, 2);
    v.r_star = std::max(first, second);

    v.C_snp = in.sfrak * std::sqrt(L) * (std::sqrt(in.n) + std::sqrt((in.alpha + 1) * L / in.c_dev));
    v.C_snp_cap = std::min(0.1 * in.r / std::sqrt(in.alpha * v.Q), std::sqrt(L) / 2);

    const double w = std::sqrt(in.alpha * L + std::log(2 * in.n + 2));
    const double root_sr = std::sqrt(in.s_star * in.rho);
    v.d1 = 4 * (v.r_max - 1) * (1 + 8 * std::sqrt(2.0) * w * root_sr);
    v.d2 = (12 * v.C_int * in.sfrak * std::sqrt(in.n) * v.r_max + in.alpha * L * v.mu_max) * root_sr;
    v.d3 = 4 * v.a * (1 + 2 * std::sqrt(2.0) * std::sqrt(in.rho) * w);
    v.d4 = (24 * v.r_star_max * in.sfrak * std::sqrt(v.Q) * v.C_int + v.mu_star_max * in.alpha * L) *
           std::sqrt(in.rho);
    v.delta = v.d1 + v.d2 + v.d3 + v.d4;

    v.a8_threshold = 2 * in.alpha * L * in.n * v.sigma_max_sq /
                     (4 * in.alpha * in.alpha / 9 * std::pow(v.mu_max * L, 2) -
                      12 * v.C_int * v.mu_max * v.r_max * in.sfrak * std::sqrt(in.n));
    v.a9_threshold = 2 * in.alpha * L * in.n * v.sigma_star_max_sq /
                     (4 * in.alpha * in.alpha / 9 * std::pow(v.mu_star_max * L, 2) -
                      24 * v.C_int * v.mu_star_max * v.r_star_max * in.sfrak * std::sqrt(v.Q));
    return v;
}

// 20 parameter combinations spread over the admissible range.
inline std::vector<Inputs> parameter_grid() {
    const double ns[] = {50, 100, 200, 400};
    const double ps[] = {500, 2000, 10000};
    const double sf[] = {1e-4, 5e-4, 1e-3, 3e-3, 0.0};
    const double al[] = {0.5, 1.0, 2.0};
    const double rs[] = {0.05, 0.1, 0.2, 0.24};
    const double cc[] = {0.5, 1.0, 3.0};
    std::vector<Inputs> out;
    for (int i = 0; i < 20; ++i) {
        Inputs in;
        in.n = ns[i % 4];
        in.p = ps[(i / 4) % 3];
        in.s = 1 + (i * 5) % 11;
        in.s_star = 2 + i % 7;
        in.sfrak = sf[(i * 3) % 5];
        in.alpha = al[i % 3];
        in.r = rs[(i / 2) % 4];
        in.theta = 0.5 + 0.25 * (i % 3);
        in.nu = 1 + i % 3;
        in.c_chi = cc[(i / 3) % 3];
        in.c_dev = i % 2 ? 0.5 : 0.25;
        in.rho = 1.0 + 0.1 * i;
        out.push_back(in);
    }
    return out;
}

inline double rhs(double s_star, double r_low, double lambda, double delta, double c_energy, double x_energy) {
    const double lead = 1.5 * lambda + std::sqrt(1 + r_low) * delta * c_energy;
    return s_star * 1.5 * r_low * lambda * lead + delta * delta * x_energy * x_energy / 2;
}

}  // namespace oracle
