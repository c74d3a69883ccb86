#include "mixlasso/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "mixlasso/errors.hpp"

namespace mixlasso {

double chi_square_cdf(double k, double x) {
    if (!(k > 0.0)) throw InvalidArgument("chi_square_cdf: degrees of freedom must be positive");
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(0.5 * k, 0.5 * x);
}

double log_chi_square_cdf(double k, double x) {
    if (!(k > 0.0)) throw InvalidArgument("log_chi_square_cdf: degrees of freedom must be positive");
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    const double a = 0.5 * k;
    const double z = 0.5 * x;
    if (z >= a + 1.0) return std::log(boost::math::gamma_p(a, z));
    // P(a, z) = z^a e^{-z} / Gamma(a + 1) * sum_{m >= 0} z^m / ((a + 1) ... (a + m)).
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 10000; ++m) {
        term *= z / (a + m);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return a * std::log(z) - z - std::lgamma(a + 1.0) + std::log(sum);
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
    if (trials == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double denom = 1.0 + z * z / n;
    const double centre = (phat + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    // Clamp so the interval always contains the point estimate despite rounding.
    return {std::min(std::max(centre - half, 0.0), phat), std::max(std::min(centre + half, 1.0), phat)};
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace mixlasso
