#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <boost/math/special_functions/gamma.hpp>

#include "mixlasso/rng.hpp"
#include "mixlasso/stats.hpp"

using namespace mixlasso;

TEST(Rng, ReproducibleFromKey) {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
    Rng c(123);
    for (int i = 0; i < 10; ++i) c.next_u64();
    EXPECT_EQ(c.counter(), 10u);
}

TEST(Rng, UniformOpenInterval) {
    Rng rng(7);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Rng, NormalMoments) {
    Rng rng(11);
    double s1 = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s1 += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s1 / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Rng, IndexInRange) {
    Rng rng(5);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto k = rng.uniform_index(7);
        ASSERT_LT(k, 7u);
        seen.insert(k);
    }
    EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, DerivedStreamsDiffer) {
    EXPECT_NE(derive_seed(1, std::uint64_t{0}), derive_seed(1, std::uint64_t{1}));
    EXPECT_NE(derive_seed(1, "design"), derive_seed(1, "noise"));
    EXPECT_EQ(derive_seed(9, "truth"), derive_seed(9, "truth"));
}

TEST(ChiSquare, LowerTailValue) {
    // P(chi^2_10 <= 1) = P(5, 1/2) = 1 - e^{-1/2} sum_{k<5} (1/2)^k / k!
    double partial = 0.0, term = 1.0;
    for (int k = 0; k < 5; ++k) {
        partial += term;
        term *= 0.5 / (k + 1);
    }
    const double exact = 1.0 - std::exp(-0.5) * partial;
    EXPECT_NEAR(chi_square_cdf(10, 1.0), exact, 1e-15);
    EXPECT_NEAR(chi_square_cdf(10, 1.0), 1.72e-4, 0.005e-4);
    EXPECT_NEAR(std::exp(log_chi_square_cdf(10, 1.0)), exact, 1e-15);
}

TEST(ChiSquare, LogStaysFinite) {
    const double lp = log_chi_square_cdf(200, 1e-3);
    EXPECT_TRUE(std::isfinite(lp));
    EXPECT_LT(lp, -700.0);
    EXPECT_NEAR(log_chi_square_cdf(4, 3.0), std::log(boost::math::gamma_p(2.0, 1.5)), 1e-13);
}

TEST(Wilson, ContainsEstimate) {
    for (std::size_t k : {0u, 1u, 5u, 50u, 99u, 100u}) {
        const Interval w = wilson_interval(k, 100);
        const double phat = k / 100.0;
        EXPECT_LE(w.low, phat);
        EXPECT_GE(w.high, phat);
        EXPECT_GE(w.low, 0.0);
        EXPECT_LE(w.high, 1.0);
    }
    // 50/100: centre 0.5, half width z sqrt(0.25/100 + z^2/40000) / (1 + z^2/100)
    const double z = 1.959963984540054;
    const double half = z * std::sqrt(0.0025 + z * z / 40000.0) / (1.0 + z * z / 100.0);
    EXPECT_NEAR(wilson_interval(50, 100).high, 0.5 + half, 1e-14);
}

TEST(Quantile, TypeSeven) {
    const std::vector<double> v = {4, 1, 3, 2};
    EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
}
