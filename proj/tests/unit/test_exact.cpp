#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <random>

#include "pattent/exact.hpp"

using namespace pattent;
using boost::multiprecision::cpp_bin_float_50;
using boost::multiprecision::cpp_int;

namespace {

// Occupancy oracle in exact integers: P(K = j) = C(k, j) j! S(n, j) / k^n.
double uniform_oracle(int k, int n) {
    std::vector<std::vector<cpp_int>> S(n + 1, std::vector<cpp_int>(n + 1, 0));
    S[0][0] = 1;
    for (int m = 1; m <= n; ++m) {
        for (int j = 1; j <= m; ++j) S[m][j] = j * S[m - 1][j] + S[m - 1][j - 1];
    }
    cpp_int kn = 1;
    for (int i = 0; i < n; ++i) kn *= k;
    cpp_bin_float_50 acc = 0;
    for (int j = 1; j <= std::min(k, n); ++j) {
        cpp_int falling = 1;
        for (int i = 0; i < j; ++i) falling *= (k - i);
        const cpp_bin_float_50 p = cpp_bin_float_50(falling * S[n][j]) / cpp_bin_float_50(kn);
        cpp_bin_float_50 lf = 0;
        for (int i = 2; i <= k - j; ++i) lf += boost::multiprecision::log(cpp_bin_float_50(i));
        acc += p * lf;
    }
    cpp_bin_float_50 lfk = 0;
    for (int i = 2; i <= k; ++i) lfk += boost::multiprecision::log(cpp_bin_float_50(i));
    const cpp_bin_float_50 ln2 = boost::multiprecision::log(cpp_bin_float_50(2));
    const cpp_bin_float_50 h = n * boost::multiprecision::log(cpp_bin_float_50(k)) / ln2 - lfk / ln2 + acc / ln2;
    return static_cast<double>(h);
}

std::vector<double> random_theta(std::mt19937_64& rng, int k) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> t(k);
    double s = 0;
    for (auto& x : t) s += (x = e(rng));
    for (auto& x : t) x /= s;
    return t;
}

}  // namespace

TEST(Pattern, Examples) {
    EXPECT_EQ(pattern_string(pattern_of(std::string_view("lossless"))), "12331433");
    EXPECT_EQ(pattern_string(pattern_of(std::string_view("76887288"))), "12331433");
    EXPECT_TRUE(pattern_of(std::string_view("")).empty());
    EXPECT_EQ(pattern_of(std::vector<int>{9, 9, 4, 9, 1}), (Pattern{1, 1, 2, 1, 3}));
    EXPECT_TRUE(is_valid_pattern({1, 1, 2, 1, 3}));
    EXPECT_FALSE(is_valid_pattern({1, 3}));
    EXPECT_FALSE(is_valid_pattern({2}));
    EXPECT_EQ(pattern_string({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), "1,2,3,4,5,6,7,8,9,10");
}

TEST(ExactEntropy, Examples) {
    EXPECT_NEAR(exact_pattern_entropy({0.5, 0.5}, 3), 2.0, 1e-12);
    EXPECT_EQ(exact_pattern_entropy({1.0}, 5), 0.0);
    EXPECT_EQ(exact_pattern_entropy({0.2, 0.8}, 1), 0.0);
    EXPECT_EQ(exact_pattern_entropy({0.2, 0.8}, 0), 0.0);
}

TEST(ExactEntropy, CapsAndWorkEstimate) {
    try {
        exact_pattern_entropy({0.25, 0.25, 0.25, 0.25}, 15);
        FAIL() << "cap not enforced";
    } catch (const TooLargeError& e) {
        EXPECT_GT(e.work(), 0);
    }
    EXPECT_THROW(exact_pattern_entropy({0.2, 0.2, 0.2, 0.2, 0.2}, 3), TooLargeError);
    ExactOptions big;
    big.allow_large = true;
    EXPECT_NEAR(exact_pattern_entropy({0.2, 0.2, 0.2, 0.2, 0.2}, 3, big), exact_uniform_pattern_entropy(5, 3), 1e-10);
    EXPECT_THROW(exact_pattern_entropy({0.5, 0.6}, 3), DomainError);
}

TEST(BruteForce, BinaryTable) {
    const BruteForceResult r = brute_force_pattern_entropy({0.2, 0.8}, 2);
    ASSERT_EQ(r.table.entries.size(), 2u);
    EXPECT_NEAR(r.table.entries.at("11"), 0.68, 1e-15);
    EXPECT_NEAR(r.table.entries.at("12"), 0.32, 1e-15);
    EXPECT_NEAR(r.entropy, binary_entropy(0.68), 1e-12);
    EXPECT_NEAR(r.entropy, 0.9044, 5e-5);
    EXPECT_EQ(r.table.to_csv(2), "pattern,probability\n11,0.68\n12,0.32\n");
    EXPECT_NEAR(r.table.total(), 1.0, 1e-15);
}

TEST(BruteForce, Cap) { EXPECT_THROW(brute_force_pattern_entropy({0.5, 0.5}, 24), TooLargeError); }

TEST(ExactEntropy, MatchesBruteForce) {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 12; ++t) {
        const int k = 1 + t % 4;
        const auto th = random_theta(rng, k);
        for (int n = 0; n <= (k == 4 ? 6 : 8); ++n) {
            EXPECT_NEAR(exact_pattern_entropy(th, n), brute_force_pattern_entropy(th, n).entropy, 1e-9);
        }
    }
}

TEST(Conditional, Definition) {
    EXPECT_EQ(conditional_index_entropy({0.3, 0.7}, 1), 0.0);
    EXPECT_NEAR(conditional_index_entropy({0.2, 0.8}, 2), 0.9044, 5e-5);
    EXPECT_NEAR(conditional_index_entropy({0.1, 0.3, 0.6}, 5),
                exact_pattern_entropy({0.1, 0.3, 0.6}, 5) - exact_pattern_entropy({0.1, 0.3, 0.6}, 4), 1e-15);
    EXPECT_THROW(conditional_index_entropy({0.5, 0.5}, 0), DomainError);
}

TEST(ExactUniform, Examples) {
    EXPECT_NEAR(exact_uniform_pattern_entropy(2, 3), 2.0, 1e-12);
    EXPECT_EQ(exact_uniform_pattern_entropy(1, 100), 0.0);
    EXPECT_THROW(exact_uniform_pattern_entropy(5001, 10), TooLargeError);
    EXPECT_THROW(exact_uniform_pattern_entropy(10, 5001), TooLargeError);
}

TEST(ExactUniform, OccupancyOracle) {
    for (int k : {2, 3, 7, 20, 50}) {
        for (int n : {1, 2, 5, 13, 40, 100}) {
            const double ref = uniform_oracle(k, n);
            EXPECT_NEAR(exact_uniform_pattern_entropy(k, n), ref, 1e-9 * std::max(1.0, ref)) << k << " " << n;
        }
    }
}

TEST(ExactUniform, AgreesWithEnumeration) {
    for (int k = 1; k <= 4; ++k) {
        const std::vector<double> th(k, 1.0 / k);
        for (int n = 0; n <= 10; ++n) EXPECT_NEAR(exact_uniform_pattern_entropy(k, n), exact_pattern_entropy(th, n), 1e-10);
    }
}

TEST(ExactUniform, LargeInstanceIsFinite) {
    const double h = exact_uniform_pattern_entropy(5000, 5000);
    EXPECT_TRUE(std::isfinite(h));
    EXPECT_LE(h, 5000 * std::log2(5000.0));
    EXPECT_GT(h, 0);
}
