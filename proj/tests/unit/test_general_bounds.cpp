#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pattent/exact.hpp"
#include "pattent/general_bounds.hpp"
#include "pattent/grids.hpp"

using namespace pattent;

namespace {

double nanmin(std::initializer_list<double> v) {
    double m = INFINITY;
    for (double x : v) {
        if (!std::isnan(x)) m = std::min(m, x);
    }
    return m;
}
double nanmax(std::initializer_list<double> v) {
    double m = -INFINITY;
    for (double x : v) {
        if (!std::isnan(x)) m = std::max(m, x);
    }
    return m;
}

ParamSearchSpec small_search(double n) {
    ParamSearchSpec s = ParamSearchSpec::defaults(n);
    s.jobs = 1;
    return s;
}

}  // namespace

TEST(LowerBound, UniformLargeProbabilities) {
    // 1/16 lies above 1/256^(1-eps) for eps < 1/2
    const LowerBoundBreakdown b = lower_bound_general(Distribution::uniform_k(16), 256, 0.3, 0.0);
    EXPECT_EQ(b.phi01.hi, 0.0);
    EXPECT_EQ(b.S2, 0.0);
    EXPECT_EQ(b.S3, 0.0);
    EXPECT_EQ(b.S4, 0.0);
    const double lf16 = std::lgamma(17.0) / std::log(2.0);
    EXPECT_LE(b.S1, lf16 + 1e-9);
    EXPECT_NEAR(b.LB, 256 * 4 - lf16, 1e-6);
    EXPECT_NEAR(b.LB, 979.75, 5e-3);
}

TEST(LowerBound, SingleSymbol) {
    for (double n : {1.0, 10.0, 1e6}) {
        const LowerBoundBreakdown b = lower_bound_general(Distribution::explicit_vector({1.0}), std::max(2.0, n), 0.2, 0.1);
        EXPECT_EQ(b.LB, 0.0);
    }
}

TEST(LowerBound, AssemblyIdentityAndVariants) {
    std::mt19937_64 rng(3);
    const std::vector<Distribution> ds = {Distribution::geometric(0.2), Distribution::zipf(1.0),
                                          Distribution::explicit_vector({0.05, 0.15, 0.3, 0.5}),
                                          Distribution::uniform_k(500)};
    for (const auto& d : ds) {
        for (int t = 0; t < 10; ++t) {
            const double n = std::pow(10.0, std::uniform_real_distribution<double>(2, 5)(rng));
            const double eps = std::uniform_real_distribution<double>(0.05, 0.8)(rng);
            const double eps0 = std::uniform_real_distribution<double>(0, 1)(rng);
            LowerBoundBreakdown b;
            try {
                b = lower_bound_general(d, std::floor(n), eps, eps0);
            } catch (const InfeasibleError&) {
                continue;
            }
            const double assembled = b.n * b.H01.lo - b.S1 + b.S2 + b.S3 - b.S4;
            EXPECT_LE(b.LB, std::max(0.0, assembled) + 1e-9 * (1 + std::fabs(assembled)));
            EXPECT_GE(b.LB, assembled - 1e-9 * (1 + std::fabs(assembled)));
            EXPECT_GE(b.S1, 0);
            EXPECT_GE(b.S3, 0);
            EXPECT_GE(b.S4, 0);
            EXPECT_DOUBLE_EQ(b.S1, nanmin({b.S1_b0, b.S1_b1, b.S1_b2}));
            if (b.s2_variant != S2Variant::none) EXPECT_DOUBLE_EQ(b.S2, nanmax({b.S2_exact, b.S2_b1, b.S2_b2}));
            EXPECT_GT(b.f_value, 0.5);
        }
    }
}

TEST(LowerBound, SeparationExponentAndEpsPrimeTerm) {
    EXPECT_GT(separation_exponent(kDefaultThetaMinus, kDefaultThetaPlus), 0.5);
    EXPECT_GT(separation_exponent(std::exp(-1.97), std::exp(0.98)), 0.2);
    // last term of eps'_n times n^(1+eps)
    const double c = std::log(kDefaultThetaMinus) / (2 * (kDefaultThetaMinus - 1));
    EXPECT_LE(c, 2.77);
}

TEST(UpperBound, UniformLargeProbabilities) {
    const UpperOptimum u = optimize_upper(Distribution::uniform_k(16), 256, small_search(256));
    const double lf16 = std::lgamma(17.0) / std::log(2.0);
    EXPECT_LE(u.best.UB, 1024 - (1 - 16 * std::exp(-16.0)) * lf16 + 1e-9);
    EXPECT_GE(u.best.UB, 1024 - lf16 - 1e-9);
}

TEST(UpperBound, SymmetricBinary) {
    const UpperOptimum u = optimize_upper(Distribution::explicit_vector({0.5, 0.5}), 4, small_search(4));
    EXPECT_GE(u.best.UB, 3.0);
    EXPECT_LE(u.best.UB, 4.0);
    EXPECT_NEAR(exact_pattern_entropy({0.5, 0.5}, 4), 3.0, 1e-12);
}

TEST(UpperBound, AssemblyIdentity) {
    std::mt19937_64 rng(5);
    const std::vector<Distribution> ds = {Distribution::geometric(0.1), Distribution::zipf(2.0),
                                          Distribution::explicit_vector({0.001, 0.009, 0.09, 0.9})};
    for (const auto& d : ds) {
        for (int t = 0; t < 12; ++t) {
            const double n = std::floor(std::pow(10.0, std::uniform_real_distribution<double>(2, 5)(rng)));
            const double e1 = std::uniform_real_distribution<double>(-0.3, 0.2)(rng);
            const double e0 = std::max(0.0, e1) + std::uniform_real_distribution<double>(0.05, 0.8)(rng);
            const double e2 = std::max(0.0, e1) + std::uniform_real_distribution<double>(0.0, 0.5)(rng);
            for (Packing pk : {Packing::separate_bins, Packing::merged_bin}) {
                UpperBoundBreakdown b;
                try {
                    b = upper_bound_general(d, n, e0, e1, e2, pk);
                } catch (const InfeasibleError&) {
                    continue;
                }
                EXPECT_GE(b.U, 0.0);
                double R = 0;
                for (double r : {b.R0, b.R1, b.R01}) R += std::isnan(r) ? 0.0 : r;
                const double assembled = b.n * b.H_packed.hi - b.U + R;
                EXPECT_GE(b.UB, std::min(assembled, b.n * d.iid_entropy().bits.hi) - 1e-9 * (1 + std::fabs(assembled)));
            }
        }
    }
}

TEST(Optimizer, BinaryUniformSandwich) {
    const double H = exact_pattern_entropy({0.5, 0.5}, 8);
    EXPECT_NEAR(H, 7.0, 1e-12);
    const auto lo = optimize_lower(Distribution::uniform_k(2), 8, small_search(8));
    const auto up = optimize_upper(Distribution::uniform_k(2), 8, small_search(8));
    EXPECT_LE(lo.best.LB, H + 1e-9);
    EXPECT_GE(up.best.UB, H - 1e-9);
}

TEST(Optimizer, SlowIntegerCoefficientNearProofValue) {
    const double n = 1e6;
    ParamSearchSpec s = small_search(n);
    s.eps_base = std::log(std::log(n)) / std::log(n);
    s.eps_coeffs.clear();
    for (int i = 1; i <= 40; ++i) s.eps_coeffs.push_back(0.1 * i);
    const LowerOptimum lo = optimize_lower(Distribution::slow_integer(1.0), n, s);
    const double c = lo.best.eps / s.eps_base;
    EXPECT_GE(c, 0.7);
    EXPECT_LE(c, 2.7);
}

TEST(Optimizer, DeterministicTieBreak) {
    const Distribution d = Distribution::geometric(0.3);
    const auto a = optimize_lower(d, 500, small_search(500));
    ParamSearchSpec par = small_search(500);
    par.jobs = 4;
    const auto b = optimize_lower(d, 500, par);
    EXPECT_EQ(a.best.LB, b.best.LB);
    EXPECT_EQ(a.best.eps, b.best.eps);
    EXPECT_EQ(a.best.eps0, b.best.eps0);
    const auto ua = optimize_upper(d, 500, small_search(500));
    const auto ub = optimize_upper(d, 500, par);
    EXPECT_EQ(ua.best.UB, ub.best.UB);
    EXPECT_EQ(ua.best.eps2, ub.best.eps2);
}

TEST(ParamSearchSpec, ParseAndSerialize) {
    const ParamSearchSpec s = ParamSearchSpec::parse("eps_coeffs=0.5,1,2; eps0=0,0.5\npacking=merged;jobs=2", 1000);
    EXPECT_EQ(s.eps_coeffs, (std::vector<double>{0.5, 1, 2}));
    EXPECT_EQ(s.eps0_values, (std::vector<double>{0, 0.5}));
    ASSERT_EQ(s.packings.size(), 1u);
    EXPECT_EQ(s.packings[0], Packing::merged_bin);
    const ParamSearchSpec r = ParamSearchSpec::parse(s.serialize(), 1000);
    EXPECT_EQ(r.serialize(), s.serialize());
    EXPECT_THROW(ParamSearchSpec::parse("bogus", 1000), ParseError);
}

TEST(Optimizer, NoFeasiblePoint) {
    ParamSearchSpec s = small_search(100);
    s.eps1_values = {0.5};
    s.ub_eps0_values = {0.1};  // every point has eps0 <= eps1
    EXPECT_THROW(optimize_upper(Distribution::geometric(0.5), 100, s), InfeasibleError);
}
