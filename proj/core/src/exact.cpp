#include "pattent/exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "pattent/numerics.hpp"

namespace pattent {

Pattern pattern_of(std::string_view sequence) {
    return pattern_of(std::vector<char>(sequence.begin(), sequence.end()));
}

bool is_valid_pattern(const Pattern& p) {
    int top = 0;
    for (int v : p) {
        if (v < 1 || v > top + 1) return false;
        top = std::max(top, v);
    }
    return true;
}

std::string pattern_string(const Pattern& p) {
    const bool wide = std::any_of(p.begin(), p.end(), [](int v) { return v > 9; });
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (wide && i) s += ',';
        s += std::to_string(p[i]);
    }
    return s;
}

double PatternTable::total() const {
    long double t = 0;
    for (const auto& [k, v] : entries) t += v;
    return static_cast<double>(t);
}

std::string PatternTable::to_csv(int digits) const {
    std::ostringstream os;
    os.precision(digits);
    os << "pattern,probability\n";
    for (const auto& [p, v] : entries) os << p << ',' << v << '\n';
    return os.str();
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

void check_theta(const std::vector<double>& theta) {
    if (theta.empty()) throw DomainError("exact: empty probability vector");
    long double s = 0;
    for (double t : theta) {
        if (!(t >= 0.0 && t <= 1.0)) throw DomainError("exact: probabilities must lie in [0, 1]");
        s += t;
    }
    if (std::fabs(static_cast<double>(s) - 1.0) > 1e-9) throw DomainError("exact: probabilities must sum to 1");
}

double binom(int a, int b) {
    double r = 1;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

// Neumaier summation over terms sorted by magnitude.
double stable_sum(std::vector<double>& v) {
    std::sort(v.begin(), v.end(), [](double a, double b) { return std::fabs(a) < std::fabs(b); });
    double s = 0, c = 0;
    for (double x : v) {
        const double t = s + x;
        c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return s + c;
}

}  // namespace

double exact_pattern_entropy(const std::vector<double>& theta, int n, const ExactOptions& opt) {
    check_theta(theta);
    if (n < 0) throw DomainError("exact: n must be >= 0");
    const int k = static_cast<int>(theta.size());
    double perms = 1;
    for (int i = 0; i < k; ++i) perms *= (k - i);
    const double work = binom(n + k - 1, k - 1) * perms;
    if (!opt.allow_large && (n > opt.max_n || k > opt.max_k)) {
        throw TooLargeError("exact: instance above the configured caps (n <= " + std::to_string(opt.max_n) +
                                ", k <= " + std::to_string(opt.max_k) + "); estimated work " + std::to_string(work),
                            work);
    }
    if (work > opt.max_work) throw TooLargeError("exact: estimated work " + std::to_string(work) + " too large", work);
    if (n <= 1) return 0.0;

    std::vector<double> lt(k);
    for (int i = 0; i < k; ++i) lt[i] = theta[i] > 0 ? std::log(theta[i]) : kNegInf;
    std::vector<double> lfact(n + 1, 0.0);
    for (int i = 2; i <= n; ++i) lfact[i] = lfact[i - 1] + std::log(static_cast<double>(i));

    std::vector<double> terms;
    std::vector<int> nu(k, 0);
    std::vector<int> parts;
    std::vector<int> used(k, 0);
    // log of the sum over injective maps of the nonzero parts into the alphabet
    auto log_q = [&]() {
        double acc = kNegInf;
        const int r = static_cast<int>(parts.size());
        // depth-first over injective assignments
        std::vector<int> assign(r, -1);
        int depth = 0;
        double partial[16] = {0};
        std::fill(used.begin(), used.end(), 0);
        while (depth >= 0) {
            int next = assign[depth] + 1;
            if (assign[depth] >= 0) used[assign[depth]] = 0;
            while (next < k && used[next]) ++next;
            if (next >= k) {
                assign[depth] = -1;
                --depth;
                continue;
            }
            assign[depth] = next;
            used[next] = 1;
            const double prev = depth ? partial[depth - 1] : 0.0;
            partial[depth] = lt[next] == kNegInf ? kNegInf : prev + parts[depth] * lt[next];
            if (depth + 1 == r) {
                acc = log_add(acc, partial[depth]);
            } else {
                ++depth;
            }
        }
        return acc;
    };

    // compositions of n into k nonnegative parts
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == k - 1) {
            nu[i] = left;
            double lp = lfact[n];
            for (int j = 0; j < k; ++j) {
                if (nu[j] == 0) continue;
                if (lt[j] == kNegInf) return;
                lp += nu[j] * lt[j] - lfact[nu[j]];
            }
            parts.clear();
            for (int j = 0; j < k; ++j) {
                if (nu[j]) parts.push_back(nu[j]);
            }
            const double q = log_q();
            terms.push_back(-std::exp(lp) * q * kLog2e);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            nu[i] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, n);
    return std::max(0.0, stable_sum(terms));
}

BruteForceResult brute_force_pattern_entropy(const std::vector<double>& theta, int n) {
    check_theta(theta);
    const int k = static_cast<int>(theta.size());
    const double count = std::pow(static_cast<double>(k), n);
    if (count > 1e7) throw TooLargeError("brute force: k^n = " + std::to_string(count) + " exceeds 1e7", count);
    BruteForceResult res;
    res.table.n = n;
    res.table.k = k;
    std::unordered_map<std::string, long double> acc;
    std::vector<int> seq(n, 0);
    const auto total = static_cast<std::int64_t>(count);
    for (std::int64_t s = 0; s < total; ++s) {
        long double p = 1;
        for (int i = 0; i < n; ++i) p *= theta[seq[i]];
        if (p > 0) acc[pattern_string(pattern_of(seq))] += p;
        for (int i = n - 1; i >= 0; --i) {
            if (++seq[i] < k) break;
            seq[i] = 0;
        }
    }
    if (n == 0) acc[""] = 1.0L;
    std::vector<double> terms;
    for (const auto& [key, p] : acc) {
        res.table.entries[key] = static_cast<double>(p);
        terms.push_back(-static_cast<double>(p * std::log2(p)));
    }
    res.entropy = std::max(0.0, stable_sum(terms));
    return res;
}

double conditional_index_entropy(const std::vector<double>& theta, int l, const ExactOptions& opt) {
    if (l < 1) throw DomainError("conditional entropy: index must be >= 1");
    if (l == 1) {
        check_theta(theta);
        return 0.0;
    }
    return exact_pattern_entropy(theta, l, opt) - exact_pattern_entropy(theta, l - 1, opt);
}

std::vector<double> exact_pattern_entropies(const std::vector<double>& theta, int n, const ExactOptions& opt) {
    std::vector<double> out;
    // the largest instance carries the cap check
    if (n >= 1) exact_pattern_entropy(theta, n, opt);
    for (int m = 1; m <= n; ++m) out.push_back(exact_pattern_entropy(theta, m, opt));
    return out;
}

double exact_uniform_pattern_entropy(std::int64_t k, std::int64_t n) {
    if (k < 1 || n < 0) throw DomainError("exact uniform: need k >= 1, n >= 0");
    if (k > 5000 || n > 5000) {
        throw TooLargeError("exact uniform: k and n are limited to 5000", static_cast<double>(k) * n);
    }
    if (k == 1 || n <= 1) return 0.0;
    // log P(K_m = j): occupancy recurrence, i.e. log of S(m, j) k!/((k-j)! k^m)
    const auto jmax = static_cast<std::size_t>(std::min(k, n));
    std::vector<double> cur(jmax + 2, kNegInf), nxt(jmax + 2, kNegInf);
    const double lk = std::log(static_cast<double>(k));
    cur[1] = 0.0;
    for (std::int64_t m = 2; m <= n; ++m) {
        std::fill(nxt.begin(), nxt.end(), kNegInf);
        const auto top = static_cast<std::size_t>(std::min<std::int64_t>(m, static_cast<std::int64_t>(jmax)));
        for (std::size_t j = 1; j <= top; ++j) {
            double v = kNegInf;
            if (cur[j] != kNegInf) v = cur[j] + std::log(static_cast<double>(j)) - lk;
            if (j >= 2 && cur[j - 1] != kNegInf) {
                v = log_add(v, cur[j - 1] + std::log(static_cast<double>(k - static_cast<std::int64_t>(j) + 1)) - lk);
            }
            nxt[j] = v;
        }
        std::swap(cur, nxt);
    }
    std::vector<double> terms;
    terms.push_back(static_cast<double>(n) * std::log2(static_cast<double>(k)));
    terms.push_back(-std::lgamma(static_cast<double>(k) + 1.0) * kLog2e);
    for (std::size_t j = 1; j <= jmax; ++j) {
        if (cur[j] == kNegInf) continue;
        const double w = std::exp(cur[j]);
        if (w == 0) continue;
        terms.push_back(w * std::lgamma(static_cast<double>(k - static_cast<std::int64_t>(j)) + 1.0) * kLog2e);
    }
    return std::max(0.0, stable_sum(terms));
}

}  // namespace pattent
