#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace mixlasso {

/// P(chi^2_k <= x), regularized lower incomplete gamma P(k/2, x/2).
double chi_square_cdf(double k, double x);

/// log P(chi^2_k <= x); stays finite when the probability underflows.
double log_chi_square_cdf(double k, double x);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Wilson score interval for `successes` out of `trials` at z = 1.959963984540054.
Interval wilson_interval(std::size_t successes, std::size_t trials);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted data.
double quantile(std::vector<double> values, double q);

}  // namespace mixlasso
