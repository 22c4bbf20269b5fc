#include <gtest/gtest.h>

#include <cmath>

#include "pattent/grids.hpp"

using namespace pattent;

TEST(EtaGrid, Example) {
    const EtaGrid g = build_eta_grid(100, 0.1, -0.1, 0.2);
    EXPECT_NEAR(g.point(1), std::pow(100.0, -1.1), 1e-15);
    EXPECT_NEAR(g.point(1), 0.00631, 1e-5);
    EXPECT_NEAR(g.point(2), 0.01585, 1e-5);
    EXPECT_NEAR(g.point(3), 4.0 / std::pow(100.0, 1.2), 1e-15);
    EXPECT_EQ(g.B, 16);
    EXPECT_EQ(g.shift, 1);
    for (std::int64_t b = 0; b <= g.B; ++b) EXPECT_LT(g.point(b), g.point(b + 1)) << b;
    EXPECT_LE(g.point(g.A), 0.5);
    EXPECT_GT(g.point(g.A + 1), 0.5);
}

TEST(EtaGrid, DegenerateRejected) {
    EXPECT_THROW(build_eta_grid(100, 0, 0, 0), DomainError);
    EXPECT_THROW(build_eta_grid(100, -0.1, -0.2, 0.1), DomainError);
    EXPECT_THROW(build_eta_grid(1, 0.1, 0, 0.1), DomainError);
}

TEST(EtaGrid, ReducesToSingleEpsilonGrid) {
    for (double n : {1e3, 1e4, 1e6}) {
        for (double eps : {0.05, 0.1, 0.3}) {
            const EtaGrid g = build_eta_grid(n, eps, -eps, 2 * eps);
            const double shift = std::floor(std::pow(n, 1.5 * eps));
            for (std::int64_t b = 3; b <= std::min<std::int64_t>(g.B, 50); ++b) {
                const double bp = static_cast<double>(b) + shift - 2;
                EXPECT_NEAR(g.point(b), bp * bp / std::pow(n, 1 + 2 * eps), 1e-12 * g.point(b));
            }
            EXPECT_NEAR(g.point(1), std::pow(n, -(1 + eps)), 1e-15);
            EXPECT_NEAR(g.point(2), std::pow(n, -(1 - eps)), 1e-15);
        }
    }
}

TEST(XiGrid, Examples) {
    const XiGrid g = build_xi_grid(100, 0.1);
    EXPECT_NEAR(g.point(1), 0.015849, 1e-6);
    EXPECT_EQ(g.B, 7);
    EXPECT_EQ(g.A, 5);
    const XiGrid z = build_xi_grid(100, 0);
    EXPECT_EQ(z.B, 10);
    EXPECT_DOUBLE_EQ(z.point(3), 0.09);
    const double n = 1e6, eps = 1.7 * std::log(std::log(n)) / std::log(n);
    const XiGrid s = build_xi_grid(n, eps);
    EXPECT_EQ(s.B, static_cast<std::int64_t>(std::floor(std::sqrt(std::pow(n, 1 - eps)))));
    EXPECT_EQ(s.A, static_cast<std::int64_t>(std::floor(std::sqrt(std::pow(n, 1 - eps)) / std::sqrt(2.0))));
}

TEST(BinStats, UniformDistinctSymbols) {
    const BinStats st = bin_stats(Distribution::uniform_k(100), build_xi_grid(100, 0));
    const double ref = 100 * (1 - std::pow(0.99, 100));
    int populated = 0;
    for (const auto& b : st.bins) {
        if (b.count == 0) continue;
        ++populated;
        EXPECT_NEAR(b.mass.mid(), 1.0, 1e-12);
        EXPECT_TRUE(b.distinct.widened_rel(1e-12).contains(ref)) << b.distinct.lo << " " << b.distinct.hi;
        EXPECT_TRUE(b.lo < 0.01 && 0.01 <= b.hi);
    }
    EXPECT_EQ(populated, 1);
    EXPECT_NEAR(ref, 63.40, 5e-3);
}

TEST(BinStats, GeometricBinOneBracket) {
    const double n = 100, p = 0.5, e0 = 0.1, e1 = -0.1;
    const BinStats st = bin_stats(Distribution::geometric(p), build_eta_grid(n, e0, e1, 0.2));
    const double k1 = st.bins[1].count;
    const double lq = -std::log2(1 - p);
    EXPECT_GE(k1, std::log2(std::pow(n, e0 - e1) * (1 - p)) / lq);
    EXPECT_LE(k1, std::log2(std::pow(n, e0 - e1) / (1 - p)) / lq);
}

TEST(BinStats, ExplicitOverlapCounters) {
    const std::vector<double> th = {0.2, 0.8};
    for (double eps : {0.0, 0.2, 0.5}) {
        const XiGrid g = build_xi_grid(50, eps);
        const BinStats st = bin_stats(Distribution::explicit_vector(th), g);
        for (std::int64_t b = 1; b < static_cast<std::int64_t>(st.bins.size()); ++b) {
            const auto& bin = st.bins[static_cast<std::size_t>(b)];
            if (bin.count == 0) {
                EXPECT_EQ(bin.count_prime, 0);
                continue;
            }
            const double lo = b == 1 ? g.point(1) : g.point(b - 1), hi = g.point(b + 2);
            double direct = 0;
            for (double t : th) direct += (t > lo && t <= hi) ? 1 : 0;
            EXPECT_EQ(bin.count_prime, direct) << "eps " << eps << " bin " << b;
        }
    }
}

TEST(BinStats, MassesAndDistinctInvariants) {
    const std::vector<Distribution> ds = {Distribution::geometric(0.3), Distribution::zipf(1.0),
                                          Distribution::slow_integer(2.0), Distribution::uniform_k(300),
                                          Distribution::explicit_vector({0.01, 0.09, 0.1, 0.3, 0.5})};
    for (const auto& d : ds) {
        const double n = 1000;
        for (const bool eta : {false, true}) {
            const BinStats st = eta ? bin_stats(d, build_eta_grid(n, 0.2, -0.1, 0.15)) : bin_stats(d, build_xi_grid(n, 0.2));
            Interval total(0);
            for (const auto& b : st.bins) {
                total = total + b.mass;
                EXPECT_LE(b.distinct.lo, b.distinct.hi);
                EXPECT_GE(b.distinct.lo, -1e-12);
                EXPECT_LE(b.distinct.hi, b.count + 1e-9);
            }
            EXPECT_TRUE(total.widened_rel(1e-9).contains(1.0)) << d.name() << " " << total.lo << " " << total.hi;
        }
    }
}

TEST(BinStats, ExplicitDistinctMatchesExactSum) {
    const std::vector<double> th = {0.001, 0.002, 0.003, 0.014, 0.08, 0.1, 0.3, 0.5};
    const double n = 200;
    const BinStats st = bin_stats(Distribution::explicit_vector(th), build_xi_grid(n, 0.1));
    for (const auto& b : st.bins) {
        double L = 0;
        for (double t : th) {
            if (t > b.lo && t <= b.hi) L += 1 - std::pow(1 - t, n);
        }
        EXPECT_TRUE(b.distinct.widened_rel(1e-12).contains(L)) << b.lo;
    }
}

TEST(BinStats, BranchBracketForBinZero) {
    // n phi - C(n,2) sum theta^2 <= L0 <= that + C(n,3) sum theta^3
    const Distribution d = Distribution::geometric(0.05);
    const double n = 1000;
    const BinStats st = bin_stats(d, build_eta_grid(n, 0.3, 0.0, 0.2));
    const auto& b0 = st.bins[0];
    const double lo = n * b0.mass.lo - n * (n - 1) / 2 * b0.sq_mass.hi;
    const double hi = n * b0.mass.hi - n * (n - 1) / 2 * b0.sq_mass.lo + n * (n - 1) * (n - 2) / 6 * b0.cube_mass.hi;
    EXPECT_GE(b0.distinct.hi, lo - 1e-12);
    EXPECT_LE(b0.distinct.lo, hi + 1e-12);
}
