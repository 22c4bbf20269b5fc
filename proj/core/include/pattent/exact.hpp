// Exact pattern entropies for small instances.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pattent/distribution.hpp"
#include "pattent/numerics.hpp"

namespace pattent {

using Pattern = std::vector<int>;

// Indices in order of first occurrence.
Pattern pattern_of(std::string_view sequence);
template <class T>
Pattern pattern_of(const std::vector<T>& sequence) {
    Pattern out;
    out.reserve(sequence.size());
    std::vector<T> seen;
    for (const T& x : sequence) {
        int idx = 0;
        for (std::size_t i = 0; i < seen.size(); ++i) {
            if (seen[i] == x) {
                idx = static_cast<int>(i) + 1;
                break;
            }
        }
        if (idx == 0) {
            seen.push_back(x);
            idx = static_cast<int>(seen.size());
        }
        out.push_back(idx);
    }
    return out;
}

bool is_valid_pattern(const Pattern& p);
std::string pattern_string(const Pattern& p);  // digits, comma separated above 9

struct PatternTable {
    int n = 0;
    int k = 0;
    std::map<std::string, double> entries;  // pattern string -> probability

    double total() const;
    // Header "pattern,probability", one row per pattern in key order.
    std::string to_csv(int digits = 17) const;
};

struct ExactOptions {
    int max_n = 14;
    int max_k = 4;
    // Set to run past the caps; max_work still applies.
    bool allow_large = false;
    double max_work = 5e8;
};

// sum over occurrence vectors of multinomial * prod theta^nu * log of the
// sum over nonzero-element permutations.
double exact_pattern_entropy(const std::vector<double>& theta, int n, const ExactOptions& opt = {});

struct BruteForceResult {
    double entropy = 0;
    PatternTable table;
};
// All k^n sequences; requires k^n <= 1e7.
BruteForceResult brute_force_pattern_entropy(const std::vector<double>& theta, int n);

// H(Psi_l | Psi^(l-1)) = H(Psi^l) - H(Psi^(l-1)).
double conditional_index_entropy(const std::vector<double>& theta, int l, const ExactOptions& opt = {});

// Block entropies H(Psi^m) for m = 1..n, sharing nothing but the caps.
std::vector<double> exact_pattern_entropies(const std::vector<double>& theta, int n, const ExactOptions& opt = {});

// Uniform over k symbols through the occupancy distribution of the number of
// distinct symbols; k, n <= 5000.
double exact_uniform_pattern_entropy(std::int64_t k, std::int64_t n);

}  // namespace pattent
