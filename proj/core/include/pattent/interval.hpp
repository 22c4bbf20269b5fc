// Closed real intervals with outward rounding.
//
// Every arithmetic result is widened by one ulp per endpoint (two for
// transcendental functions), which covers the round-to-nearest error of
// the underlying double operation.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace pattent {

inline double round_down(double x, int ulps = 1) {
    for (int i = 0; i < ulps; ++i) x = std::nextafter(x, -std::numeric_limits<double>::infinity());
    return x;
}
inline double round_up(double x, int ulps = 1) {
    for (int i = 0; i < ulps; ++i) x = std::nextafter(x, std::numeric_limits<double>::infinity());
    return x;
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    constexpr Interval() = default;
    constexpr Interval(double v) : lo(v), hi(v) {}  // NOLINT: implicit on purpose
    constexpr Interval(double l, double h) : lo(l), hi(h) {}

    static Interval hull(double a, double b) { return {std::min(a, b), std::max(a, b)}; }
    static Interval entire() {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }

    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool degenerate() const { return lo == hi; }
    bool valid() const { return lo <= hi; }
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }

    // Widen outward by `ulps` units in the last place on each side.
    Interval widened(int ulps = 1) const { return {round_down(lo, ulps), round_up(hi, ulps)}; }
    // Widen by a relative amount of |x| on each endpoint.
    Interval widened_rel(double rel) const {
        return {round_down(lo - std::fabs(lo) * rel), round_up(hi + std::fabs(hi) * rel)};
    }

    Interval& operator+=(const Interval& o);
    Interval& operator-=(const Interval& o);
    Interval& operator*=(const Interval& o);
};

using EntropyInterval = Interval;

inline Interval operator+(const Interval& a, const Interval& b) {
    double l = (a.lo == 0 || b.lo == 0) ? a.lo + b.lo : round_down(a.lo + b.lo);
    if (l < 0 && a.lo >= 0 && b.lo >= 0) l = 0.0;  // sums of nonnegatives stay nonnegative
    return {l, (a.hi == 0 || b.hi == 0) ? a.hi + b.hi : round_up(a.hi + b.hi)};
}
inline Interval operator-(const Interval& a, const Interval& b) {
    return {round_down(a.lo - b.hi), round_up(a.hi - b.lo)};
}
inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator*(const Interval& a, const Interval& b) {
    if (a.lo >= 0 && b.lo >= 0) {
        const double l = a.lo * b.lo, h = a.hi * b.hi;
        // a product with an exact zero factor is exact
        return {std::isnan(l) || l == 0 ? 0.0 : std::max(0.0, round_down(l)),
                std::isnan(h) || a.hi == 0 || b.hi == 0 ? 0.0 : round_up(h)};
    }
    double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    double lo = c[0], hi = c[0];
    for (double v : c) {
        // 0 * inf shows up for unbounded sub-quantities multiplied by an exact zero
        if (std::isnan(v)) v = 0.0;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {round_down(lo), round_up(hi)};
}

// Division requires the divisor to exclude zero.
inline Interval operator/(const Interval& a, const Interval& b) {
    const Interval inv{round_down(1.0 / b.hi), round_up(1.0 / b.lo)};
    if (b.lo > 0 || b.hi < 0) return a * inv;
    return Interval::entire();
}

inline Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
inline Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
inline Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }

inline Interval intersect(const Interval& a, const Interval& b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}
inline Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}
inline Interval max(const Interval& a, const Interval& b) {
    return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}
inline Interval min(const Interval& a, const Interval& b) {
    return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}
inline Interval clamp(const Interval& a, double lo, double hi) {
    return {std::clamp(a.lo, lo, hi), std::clamp(a.hi, lo, hi)};
}

// Monotone increasing functions: evaluate at endpoints, widen by two ulps.
// log(1) = 0 is exact and stays unwidened.
inline Interval log2(const Interval& a) {
    auto f = [](double x, bool up) {
        if (!(x > 0)) return -std::numeric_limits<double>::infinity();
        if (x == 1.0) return 0.0;
        return up ? round_up(std::log2(x), 2) : round_down(std::log2(x), 2);
    };
    return {f(a.lo, false), f(a.hi, true)};
}
inline Interval log(const Interval& a) {
    auto f = [](double x, bool up) {
        if (!(x > 0)) return -std::numeric_limits<double>::infinity();
        if (x == 1.0) return 0.0;
        return up ? round_up(std::log(x), 2) : round_down(std::log(x), 2);
    };
    return {f(a.lo, false), f(a.hi, true)};
}
inline Interval exp(const Interval& a) {
    return {std::max(0.0, round_down(std::exp(a.lo), 2)), round_up(std::exp(a.hi), 2)};
}
inline Interval sqrt(const Interval& a) {
    return {round_down(std::sqrt(std::max(0.0, a.lo))), round_up(std::sqrt(std::max(0.0, a.hi)))};
}
// x^t for x >= 0 and real t.
inline Interval pow(const Interval& a, double t) {
    double l = std::pow(std::max(0.0, a.lo), t), h = std::pow(std::max(0.0, a.hi), t);
    if (t < 0) std::swap(l, h);
    return {std::max(0.0, round_down(l, 2)), round_up(h, 2)};
}

inline std::ostream& operator<<(std::ostream& os, const Interval& a) {
    return os << '[' << a.lo << ", " << a.hi << ']';
}

}  // namespace pattent
