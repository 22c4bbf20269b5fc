#include <gtest/gtest.h>

#include <cmath>

#include "pattent/closed_form.hpp"

using namespace pattent;

namespace {

// table tolerance: 20% relative or 2 bits absolute on a gap
bool gap_close(double got, double want) { return std::fabs(got - want) <= std::max(0.2 * std::fabs(want), 2.0); }

}  // namespace

TEST(Uniform, SingleSymbol) {
    for (double n : {1.0, 100.0, 1e9}) {
        const ClosedFormResult r = uniform_bounds_k(1, n);
        EXPECT_EQ(r.LB, 0.0);
        EXPECT_EQ(r.UB, 0.0);
    }
}

TEST(Uniform, RateOneConstants) {
    const double n = 1e8;
    const UniformRatePieces pc = uniform_rate_pieces(1.0, n);
    const double base = n / kE * std::log2(n);
    EXPECT_NEAR(pc.alpha, 1.93, 0.05);
    EXPECT_NEAR((pc.code_LB - base) / n, 0.38, 0.03);
    EXPECT_NEAR((pc.code_UB - base) / n, 0.76, 0.03);
    EXPECT_NEAR((pc.binned_LB - base) / n, 0.29, 0.02);
    EXPECT_NEAR((pc.binned_UB - base) / n, 0.95, 0.02);
}

TEST(Uniform, CodeRouteTighterThanBinnedRoute) {
    for (double lambda : {0.5, 1.0, 2.0}) {
        const UniformRatePieces pc = uniform_rate_pieces(lambda, 1000);
        EXPECT_GE(pc.code_LB, pc.binned_LB) << lambda;
        EXPECT_LE(pc.code_UB, pc.binned_UB) << lambda;
    }
}

TEST(Uniform, RegimeLabels) {
    EXPECT_EQ(uniform_bounds_k(10, 1e6).regime, "large-prob");
    EXPECT_EQ(uniform_bounds_rate(1.0, 1e4).regime, "middle");
    EXPECT_EQ(uniform_bounds_k(100000000, 1000).regime, "small-prob");
}

TEST(Uniform, LargeProbabilitySandwich) {
    for (std::int64_t k : {2, 5, 16, 40}) {
        const double n = 1e5;
        const ClosedFormResult r = uniform_bounds_k(k, n);
        const double nH = n * std::log2(static_cast<double>(k));
        const double lk = std::lgamma(static_cast<double>(k) + 1) / std::log(2.0);
        EXPECT_NEAR(r.LB, nH - lk, 1e-6 * nH);
        EXPECT_LE(r.UB, nH * (1 + 1e-12));
        EXPECT_LE(r.LB, r.UB);
    }
}

TEST(SlowInteger, GammaTwoAsymptoticGap) {
    const double n = 1e6;
    const ClosedFormResult r = slow_integer_bounds(2.0, n, BoundMode::asymptotic);
    const double alpha = Distribution::slow_integer(2.0).normalizer().mid();
    const double per = alpha * std::log(2.0) / std::log2(n);
    EXPECT_NEAR(r.aux.at("per_symbol_gap"), per, 1e-9);
    EXPECT_NEAR(per / alpha, 0.0348, 1e-4);
}

TEST(SlowInteger, GammaOneFiniteN) {
    const ClosedFormResult r = slow_integer_bounds(1.0, 1000, BoundMode::finite_n);
    EXPECT_GT(r.LB, 0);
    EXPECT_GT(r.UB, 0);
    EXPECT_LE(r.LB, r.UB);
}

TEST(SlowInteger, InfiniteEntropyRate) {
    const ClosedFormResult r = slow_integer_bounds(0.5, 1e4, BoundMode::finite_n);
    EXPECT_TRUE(r.iid_infinite);
    EXPECT_TRUE(std::isfinite(r.LB));
    EXPECT_TRUE(std::isfinite(r.UB));
    EXPECT_GT(r.LB, 0);
}

TEST(Zipf, AsymptoticCoefficient) {
    const ClosedFormResult r = zipf_bounds(1.0, 1e6, BoundMode::asymptotic);
    const double zeta2 = kPi * kPi / 6;
    EXPECT_NEAR(r.aux.at("coef_LB"), (1 + 1 - 1.0 / 9) / (2 * std::sqrt(zeta2)), 1e-9);
    EXPECT_NEAR(r.aux.at("coef_LB"), 0.7365, 1e-3);
    EXPECT_GE(r.aux.at("zeta"), 1.5);
    EXPECT_LE(r.aux.at("zeta"), 1.75);
}

TEST(Zipf, FiniteGapOrdering) {
    const ClosedFormResult r = zipf_bounds(1.0, 1000, BoundMode::finite_n);
    const double gl = r.nHX.hi - r.LB, gu = r.nHX.lo - r.UB;
    EXPECT_GE(gl, gu);
    EXPECT_GT(gu, 0);
}

TEST(Zipf, AsymptoticAndFiniteConverge) {
    const double n = 1e8;
    const ClosedFormResult a = zipf_bounds(1.0, n, BoundMode::asymptotic);
    const ClosedFormResult f = zipf_bounds(1.0, n, BoundMode::finite_n);
    const double ga = a.nHX.mid() - a.LB, gf = f.nHX.mid() - f.LB;
    const double ua = a.nHX.mid() - a.UB, uf = f.nHX.mid() - f.UB;
    EXPECT_LT(std::fabs(ga - gf) / std::max(ga, gf), 0.25);
    EXPECT_LT(std::fabs(ua - uf) / std::max(ua, uf), 0.25);
}

TEST(Geometric, Constants) {
    EXPECT_NEAR(geometric_CL1(0.5), 1 + 5.375 / 2.25, 1e-12);
    EXPECT_NEAR(geometric_CL1(0.5), 3.3889, 1e-4);
    EXPECT_NEAR(geometric_bg_max(0.5), 8.2426, 1e-4);
}

TEST(Geometric, TableRows) {
    const ClosedFormResult r = geometric_bounds(0.01, 10, BoundMode::finite_n);
    EXPECT_NEAR(r.nHX.mid(), 80.8, 0.05);
    EXPECT_TRUE(gap_close(r.nHX.mid() - r.UB, 78.52));
    EXPECT_TRUE(gap_close(r.nHX.mid() - r.LB, 79.16));
    const ClosedFormResult g = geometric_bounds(0.05, 1000, BoundMode::finite_n);
    EXPECT_TRUE(gap_close(g.nHX.mid() - g.LB, 5728 - 5124.0));
    EXPECT_LE(g.UB, 5630);
}

TEST(Geometric, LargeNRow) {
    const ClosedFormResult r = geometric_bounds(0.8, 1e10, BoundMode::finite_n);
    EXPECT_TRUE(gap_close(r.nHX.mid() - r.UB, 0.07));
    EXPECT_TRUE(gap_close(r.nHX.mid() - r.LB, 18.66));
    EXPECT_LE(r.LB, r.UB);
}

TEST(Geometric, AsymptoticDeltaGate) {
    const ClosedFormResult r = geometric_bounds(0.5, 1e8, BoundMode::asymptotic);
    EXPECT_NEAR(r.aux.at("delta"), std::log(20.0) / std::log(std::log(1e8)), 1e-12);
    EXPECT_FALSE(r.rigorous);
}

TEST(Linear, RegimeTwoLeadingGap) {
    const double n = 1e6, lambda = 1000;
    const ClosedFormResult r = linear_bounds(lambda, n, BoundMode::asymptotic);
    EXPECT_EQ(r.regime, "2");
    const double gap = r.nHX.mid() - r.asymptotic_LB;
    EXPECT_NEAR(gap, 1000 * std::log2(std::pow(10.0, 1.5)), 1e-6);
    EXPECT_NEAR(gap, 4983, 1);
}

TEST(Linear, RegimeThreeBracket) {
    const ClosedFormResult r = linear_bounds(0.25, 1000, BoundMode::asymptotic);
    EXPECT_EQ(r.regime, "3");
    EXPECT_NEAR(r.aux.at("C_lambda_lo"), (1 - 2 * 0.25 / 3) * 2 / 3, 1e-15);
    EXPECT_NEAR(r.aux.at("C_lambda_hi"), 2.0 / 3, 1e-15);
}

TEST(Linear, RegimeOne) {
    const double n = 1e6;
    const ClosedFormResult r = linear_bounds(2e5, n, BoundMode::finite_n);
    EXPECT_EQ(r.regime, "1");
    EXPECT_LE(r.LB, r.UB);
}

TEST(Dispatch, FamilyBoundsModes) {
    const Distribution d = Distribution::explicit_vector({0.2, 0.3, 0.5});
    EXPECT_THROW(family_bounds(d, 8, BoundMode::asymptotic), InfeasibleError);
    const ClosedFormResult g = family_bounds(d, 8, BoundMode::general);
    EXPECT_LE(g.LB, g.UB);
    EXPECT_THROW(parse_mode("fast"), ParseError);
    EXPECT_EQ(parse_mode("finite_n"), BoundMode::finite_n);
}
