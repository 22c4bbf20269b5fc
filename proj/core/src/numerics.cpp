#include "pattent/numerics.hpp"

#include <cmath>
#include <mutex>
#include <vector>

namespace pattent {

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary_entropy: argument outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

Interval binary_entropy(const Interval& x) {
    const double lo = std::max(0.0, x.lo), hi = std::min(1.0, x.hi);
    if (lo > hi) throw DomainError("binary_entropy: interval outside [0,1]");
    const double a = binary_entropy(lo), b = binary_entropy(hi);
    double vmin = std::min(a, b), vmax = std::max(a, b);
    if (lo <= 0.5 && 0.5 <= hi) vmax = 1.0;
    return {std::max(0.0, round_down(vmin, 4)), std::min(1.0, round_up(vmax, 4))};
}

namespace {
double xlog2inv_point(double x) { return x <= 0.0 ? 0.0 : -x * std::log2(x); }
}  // namespace

Interval xlog2inv(const Interval& x) {
    const double lo = std::max(0.0, x.lo), hi = std::min(1.0, x.hi);
    const double a = xlog2inv_point(lo), b = xlog2inv_point(hi);
    double vmin = std::min(a, b), vmax = std::max(a, b);
    if (lo <= 1.0 / kE && 1.0 / kE <= hi) vmax = kLog2e / kE;
    // x log(1/x) vanishes exactly at 0 and 1
    const bool exact = (lo == 0.0 || lo == 1.0) && (hi == 0.0 || hi == 1.0);
    if (exact) return {0.0, vmax == 0.0 ? 0.0 : round_up(vmax, 3)};
    return {std::max(0.0, round_down(vmin, 3)), round_up(vmax, 3)};
}

namespace {

const std::vector<double>& factorial_table() {
    static const std::vector<double> table = [] {
        const auto n = static_cast<std::size_t>(kExactFactorialLimit);
        std::vector<double> t(n + 1, 0.0);
        long double acc = 0;
        for (std::size_t j = 2; j <= n; ++j) {
            acc += std::log2(static_cast<long double>(j));
            t[j] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

}  // namespace

Interval log_factorial(double m) {
    if (!(m >= 0.0)) throw DomainError("log_factorial: negative argument");
    if (m == std::floor(m) && m <= kExactFactorialLimit) {
        return Interval(factorial_table()[static_cast<std::size_t>(m)]);
    }
    if (!std::isfinite(m)) return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    // sqrt(2 pi m) (m/e)^m <= Gamma(m+1) <= same * e^{1/(12m)}, valid for real m > 0
    const long double ml = m;
    const long double base = 0.5L * std::log2(2.0L * 3.14159265358979323846L * ml) +
                             ml * (std::log2(ml) - 1.44269504088896340736L);
    const long double slack = 1.44269504088896340736L / (12.0L * ml);
    const long double err = 16.0L * std::numeric_limits<long double>::epsilon() * (std::fabs(base) + 1.0L);
    const long double lo = base - err, hi = base + slack + err;
    const double dlo = std::nextafter(static_cast<double>(lo), -INFINITY);
    const double dhi = std::nextafter(static_cast<double>(hi), INFINITY);
    // Gamma(m+1) < 1 on (0, 1)
    return {m >= 1.0 ? std::max(0.0, dlo) : dlo, dhi};
}

Interval log2_binomial(double a, double b) {
    if (!(b >= 0.0 && b <= a)) throw DomainError("log2_binomial: need 0 <= b <= a");
    const Interval fa = log_factorial(a), fb = log_factorial(b), fc = log_factorial(a - b);
    Interval r = fa - fb - fc;
    r.lo = std::max(0.0, r.lo);
    return r;
}

Interval tail_integral_bounds(const std::function<Interval(double)>& f,
                              const std::function<Interval(double)>& integral_from, double from) {
    const Interval integral = integral_from(from);
    if (!std::isfinite(integral.hi)) throw DivergenceError("tail_integral_bounds: integral diverges");
    const Interval head = f(from);
    return {std::max(0.0, integral.lo), round_up(head.hi + integral.hi)};
}

Interval convex_tail_bounds(const std::function<Interval(double)>& f,
                            const std::function<Interval(double)>& integral_from, double from) {
    const Interval upper = integral_from(from - 0.5);
    const Interval lower = integral_from(from);
    if (!std::isfinite(upper.hi)) throw DivergenceError("convex_tail_bounds: integral diverges");
    const Interval head = f(from);
    return {round_down(lower.lo + 0.5 * head.lo), upper.hi};
}

Interval IntervalSum::value() const {
    // |error| <= (terms + 2) * u * sum|x_i| for recursive summation in long double,
    // plus the final conversion to double.
    const long double u = std::numeric_limits<long double>::epsilon();
    const long double err = (static_cast<long double>(terms_) + 2) * u * abs_;
    return {round_down(static_cast<double>(lo_ - err)), round_up(static_cast<double>(hi_ + err))};
}

}  // namespace pattent
