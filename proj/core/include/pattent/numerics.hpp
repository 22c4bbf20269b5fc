// Shared numerics: binary entropy, factorial brackets, series tails.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "pattent/interval.hpp"

namespace pattent {

inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kLog2e = 1.44269504088896340736;
inline constexpr double kE = 2.71828182845904523536;
inline constexpr double kPi = 3.14159265358979323846;

class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class DivergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// h2(x) in bits; 0 at the endpoints.
double binary_entropy(double x);

// Range of h2 over an interval inside [0, 1].
Interval binary_entropy(const Interval& x);

// Range of x*log2(1/x) over an interval inside [0, 1]; the maximum sits at 1/e.
Interval xlog2inv(const Interval& x);

// log2(m!) for real m >= 0. Integers up to kExactFactorialLimit are summed
// exactly (degenerate result); everything else gets the Stirling bracket.
inline constexpr double kExactFactorialLimit = 1e4;
Interval log_factorial(double m);

// log2 C(a, b) bracket for 0 <= b <= a.
Interval log2_binomial(double a, double b);

// Sum over j >= from of a positive decreasing f, bracketed by
// [integral, f(from) + integral]. `integral_from(x)` must return a bracket
// on the integral of f over [x, inf); an infinite upper endpoint signals
// divergence.
Interval tail_integral_bounds(const std::function<Interval(double)>& f,
                              const std::function<Interval(double)>& integral_from, double from);

// Tighter bracket for convex decreasing f:
// [integral_from(from) + f(from)/2, integral_from(from - 1/2)].
Interval convex_tail_bounds(const std::function<Interval(double)>& f,
                            const std::function<Interval(double)>& integral_from, double from);

// Running sum of intervals in extended precision. The final interval is
// widened by the worst-case recursive-summation error.
class IntervalSum {
  public:
    void add(const Interval& v) {
        lo_ += v.lo;
        hi_ += v.hi;
        abs_ += std::fabs(v.lo) > std::fabs(v.hi) ? std::fabs(v.lo) : std::fabs(v.hi);
        ++terms_;
    }
    void add(const Interval& v, double multiplicity) {
        lo_ += static_cast<long double>(v.lo) * multiplicity;
        hi_ += static_cast<long double>(v.hi) * multiplicity;
        abs_ += (std::fabs(v.lo) > std::fabs(v.hi) ? std::fabs(v.lo) : std::fabs(v.hi)) * multiplicity;
        ++terms_;
    }
    Interval value() const;
    std::uint64_t terms() const { return terms_; }

  private:
    long double lo_ = 0, hi_ = 0, abs_ = 0;
    std::uint64_t terms_ = 0;
};

}  // namespace pattent
