#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pattent/numerics.hpp"

using namespace pattent;

namespace {

long double log2_factorial_sum(int m) {
    long double s = 0;
    for (int j = 2; j <= m; ++j) s += std::log2(static_cast<long double>(j));
    return s;
}

}  // namespace

TEST(BinaryEntropy, Examples) {
    EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    const long double x = 0.01L;
    const long double ref = -x * std::log2(x) - (1 - x) * std::log2(1 - x);
    EXPECT_NEAR(binary_entropy(0.01), static_cast<double>(ref), 1e-15);
    EXPECT_NEAR(binary_entropy(0.01), 0.0808, 5e-5);
}

TEST(BinaryEntropy, DomainErrors) {
    EXPECT_THROW(binary_entropy(-0.1), DomainError);
    EXPECT_THROW(binary_entropy(1.5), DomainError);
}

TEST(BinaryEntropy, SymmetricAndConcave) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng), y = u(rng);
        EXPECT_NEAR(binary_entropy(x), binary_entropy(1.0 - x), 1e-12);
        EXPECT_GE(binary_entropy(0.5 * (x + y)) + 1e-12, 0.5 * (binary_entropy(x) + binary_entropy(y)));
    }
}

TEST(BinaryEntropy, IntervalRangeContainsPoints) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        const Interval h = binary_entropy(Interval(a, b));
        for (int s = 0; s <= 10; ++s) EXPECT_TRUE(h.contains(binary_entropy(std::min(b, a + (b - a) * s / 10.0))));
    }
}

TEST(LogFactorial, Examples) {
    const Interval z = log_factorial(0);
    EXPECT_EQ(z.lo, 0.0);
    EXPECT_EQ(z.hi, 0.0);
    const Interval f16 = log_factorial(16);
    EXPECT_TRUE(f16.degenerate());
    EXPECT_NEAR(f16.lo, static_cast<double>(log2_factorial_sum(16)), 1e-12);
    EXPECT_NEAR(f16.lo, 44.250, 5e-4);
    const Interval big = log_factorial(1e6);
    // Stirling slack log2(e)/(12m) = 1.2022e-7 plus outward rounding
    EXPECT_LE(big.width(), 1.2022e-7 + 4 * 3.8e-9);
    EXPECT_TRUE(big.contains(static_cast<double>(std::lgamma(1e6L + 1) / std::log(2.0L))));
    EXPECT_THROW(log_factorial(-1), DomainError);
}

TEST(LogFactorial, ExactBranchAndStirlingBracket) {
    for (int m = 0; m <= 10000; m += 37) {
        const Interval f = log_factorial(m);
        EXPECT_TRUE(f.degenerate()) << m;
        EXPECT_NEAR(f.lo, static_cast<double>(log2_factorial_sum(m)), 1e-9 * (1.0 + f.lo)) << m;
    }
    for (double m : {10001.0, 12345.5, 3.7e5, 1e9, 2.5}) {
        const Interval f = log_factorial(m);
        const double ref = static_cast<double>(std::lgamma(static_cast<long double>(m) + 1) / std::log(2.0L));
        EXPECT_LE(f.lo, ref + 1e-9 * ref) << m;
        EXPECT_GE(f.hi, ref - 1e-9 * ref) << m;
    }
}

TEST(TailIntegral, InverseSquare) {
    const double a = 3.0;
    auto f = [a](double x) { return Interval(a / (x * x)); };
    auto I = [a](double x) { return Interval(a / x); };
    const Interval t = tail_integral_bounds(f, I, 2.0);
    EXPECT_NEAR(t.lo, a / 2, 1e-12);
    EXPECT_NEAR(t.hi, 3 * a / 4, 1e-12);
}

TEST(TailIntegral, ZetaTwo) {
    auto f = [](double x) { return Interval(1.0 / (x * x)); };
    auto I = [](double x) { return Interval(1.0 / x); };
    EXPECT_TRUE(tail_integral_bounds(f, I, 1.0).contains(kPi * kPi / 6));
    EXPECT_TRUE(convex_tail_bounds(f, I, 1.0).contains(kPi * kPi / 6));
}

TEST(TailIntegral, SlowIntegerPartialSumOracle) {
    // f(x) = 1 / (x log2(x)^2); the tail from a is ln 2 / log2(a)
    auto f = [](double x) { return Interval(1.0 / (x * std::log2(x) * std::log2(x))); };
    auto I = [](double x) { return Interval(kLn2 / std::log2(x)); };
    const double j0 = 10, M = 200000;
    long double part = 0;
    for (double j = j0; j < M; ++j) part += 1.0L / (j * std::log2(j) * std::log2(j));
    const Interval from_j0 = tail_integral_bounds(f, I, j0);
    const Interval from_M = tail_integral_bounds(f, I, M);
    const double lo = static_cast<double>(part) + from_M.lo, hi = static_cast<double>(part) + from_M.hi;
    EXPECT_GE(lo, from_j0.lo - 1e-12);
    EXPECT_LE(hi, from_j0.hi + 1e-12);
}

TEST(TailIntegral, DivergenceSignalled) {
    auto f = [](double x) { return Interval(1.0 / x); };
    auto I = [](double) { return Interval(0, std::numeric_limits<double>::infinity()); };
    EXPECT_THROW(tail_integral_bounds(f, I, 1.0), DivergenceError);
}

TEST(IntervalArithmetic, RandomSamplesStayInside) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0), pos(1e-3, 10.0);
    auto make = [&](bool positive) {
        double a = positive ? pos(rng) : u(rng), b = positive ? pos(rng) : u(rng);
        if (a > b) std::swap(a, b);
        return Interval(a, b);
    };
    for (int i = 0; i < 3000; ++i) {
        const Interval x = make(false), y = make(false), p = make(true), q = make(true);
        const double t = std::uniform_real_distribution<double>(0, 1)(rng);
        const double xs = x.lo + t * (x.hi - x.lo), ys = y.lo + (1 - t) * (y.hi - y.lo);
        const double ps = p.lo + t * (p.hi - p.lo), qs = q.lo + (1 - t) * (q.hi - q.lo);
        EXPECT_TRUE((x + y).contains(xs + ys));
        EXPECT_TRUE((x - y).contains(xs - ys));
        EXPECT_TRUE((x * y).contains(xs * ys));
        EXPECT_TRUE((x / p).contains(xs / ps));
        EXPECT_TRUE(log2(p).contains(std::log2(ps)));
        EXPECT_TRUE(log(p).contains(std::log(ps)));
        EXPECT_TRUE(exp(Interval(x.lo / 10, x.hi / 10)).contains(std::exp(xs / 10)));
        EXPECT_TRUE(sqrt(p).contains(std::sqrt(ps)));
        EXPECT_TRUE(pow(p, 1.7).contains(std::pow(ps, 1.7)));
        const double xv = ps / 10;
        EXPECT_TRUE(xlog2inv(Interval(std::min(ps, qs) / 10, std::max(ps, qs) / 10))
                        .contains(static_cast<double>(-static_cast<long double>(xv) * std::log2(static_cast<long double>(xv)))));
    }
}

TEST(IntervalSum, WidensForRoundoff) {
    IntervalSum s;
    long double ref = 0;
    for (int i = 1; i <= 100000; ++i) {
        const double v = 1.0 / i;
        s.add(Interval(v));
        ref += 1.0L / i;
    }
    EXPECT_TRUE(s.value().contains(static_cast<double>(ref)));
    EXPECT_LT(s.value().width(), 1e-9);
}

TEST(LogBinomial, MatchesLgamma) {
    for (double a : {5.0, 20.0, 1000.0, 2.5e7}) {
        for (double b : {0.0, 1.0, 3.0, std::floor(a / 2)}) {
            const double ref = static_cast<double>(
                (std::lgamma(a + 1.0L) - std::lgamma(b + 1.0L) - std::lgamma(a - b + 1.0L)) / std::log(2.0L));
            const Interval v = log2_binomial(a, b);
            EXPECT_LE(v.lo, ref + 1e-8 * (1 + ref));
            EXPECT_GE(v.hi, ref - 1e-8 * (1 + ref));
        }
    }
}
