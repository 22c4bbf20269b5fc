#include "pattent/grids.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pattent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double EtaGrid::point(std::int64_t b) const {
    if (b <= 0) return 0.0;
    if (b == 1) return std::pow(n, -(1.0 + eps0));
    if (b == 2) return std::pow(n, -(1.0 + eps1));
    if (b > B) return 1.0;
    const double bp = bprime(b);
    return std::min(1.0, bp * bp / std::pow(n, 1.0 + eps2));
}

double XiGrid::point(std::int64_t b) const {
    if (b <= 0) return 0.0;
    if (b > B) return 1.0;
    const double bb = static_cast<double>(b);
    return std::min(1.0, bb * bb / std::pow(n, 1.0 - eps));
}

EtaGrid build_eta_grid(double n, double eps0, double eps1, double eps2) {
    if (!(n >= 2)) throw DomainError("eta grid: need n >= 2");
    if (!(eps0 >= std::max(0.0, eps1))) throw DomainError("eta grid: need eps0 >= max(0, eps1)");
    if (!(eps2 >= std::max(0.0, eps1))) throw DomainError("eta grid: need eps2 >= max(0, eps1)");
    if (!(eps0 > eps1)) throw DomainError("eta grid: eps0 == eps1 makes eta_1 == eta_2 (non-monotone)");
    EtaGrid g;
    g.n = n;
    g.eps0 = eps0;
    g.eps1 = eps1;
    g.eps2 = eps2;
    g.shift = std::floor(std::pow(n, (eps2 - eps1) / 2.0));
    const double root = std::sqrt(std::pow(n, 1.0 + eps2));
    g.B = static_cast<std::int64_t>(std::floor(root) - g.shift + 2.0);
    g.A = static_cast<std::int64_t>(std::floor(root / std::sqrt(2.0)) - g.shift + 2.0);
    if (g.B < 2) g.B = 2;
    g.A = std::clamp<std::int64_t>(g.A, 1, g.B);
    while (g.A < g.B && g.point(g.A + 1) <= 0.5) ++g.A;
    while (g.A > 1 && g.point(g.A) > 0.5) --g.A;
    for (std::int64_t b = 1; b <= std::min<std::int64_t>(g.B, 3); ++b) {
        if (!(g.point(b) < g.point(b + 1)) && b < g.B) throw DomainError("eta grid: points are not increasing");
    }
    return g;
}

XiGrid build_xi_grid(double n, double eps) {
    if (!(n >= 2)) throw DomainError("xi grid: need n >= 2");
    XiGrid g;
    g.n = n;
    g.eps = eps;
    const double root = std::sqrt(std::pow(n, 1.0 - eps));
    g.B = static_cast<std::int64_t>(std::floor(root));
    g.A = static_cast<std::int64_t>(std::floor(root / std::sqrt(2.0)));
    return g;
}

// ---------------------------------------------------------------------------

namespace {

// 1 - (1-x)^n
double distinct_point(double x, double n) {
    if (x >= 1.0) return 1.0;
    return -std::expm1(n * std::log1p(-x));
}

// n x - 1 + exp(-n(x + x^2)), split to avoid cancellation for small n x
double reoccurrence_point(double x, double n) {
    const double y = n * (x + x * x);
    double g;
    if (y < 1e-2) {
        g = y * y * (0.5 - y * (1.0 / 6.0 - y * (1.0 / 24.0 - y * (1.0 / 120.0 - y / 720.0))));
    } else {
        g = std::expm1(-y) + y;
    }
    return g - n * x * x;
}

}  // namespace

HeadTable::HeadTable(const Distribution& dist, double n, double max_entries) : dist_(dist), n_(n) {
    const double cap = std::min(max_entries, dist.options().max_enumeration);
    double floor_theta = 0.0;
    if (dist.infinite_support() || dist.band_count(0.0, 1.0) > cap) floor_theta = std::pow(n, -2.5);
    if (count_above(floor_theta) > cap) {
        // bisect in log space for a floor that keeps the table under the cap
        double lo = std::log(floor_theta), hi = 0.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (count_above(std::exp(mid)) > cap) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        floor_theta = std::exp(hi);
    }

    long double c = 0;
    long double acc_lo[kCols] = {}, acc_hi[kCols] = {}, acc_abs[kCols] = {};
    auto push_all = [&] {
        cum_.push_back(static_cast<double>(c));
        for (int k = 0; k < kCols; ++k) {
            cols_[k].lo.push_back(static_cast<double>(acc_lo[k]));
            cols_[k].hi.push_back(static_cast<double>(acc_hi[k]));
        }
    };
    push_all();
    const double u = std::numeric_limits<double>::epsilon();
    dist.visit_band(
        floor_theta, 1.0,
        [&](const Interval& t, double mult) {
            const Interval d(distinct_point(t.lo, n_) * (1 - 8 * u), std::min(1.0, distinct_point(t.hi, n_) * (1 + 8 * u)));
            const double wl0 = reoccurrence_point(t.lo, n_), wh0 = reoccurrence_point(t.hi, n_);
            const Interval w(wl0 - std::fabs(wl0) * 1e-13, wh0 + std::fabs(wh0) * 1e-13);
            const Interval lg = -log2(t);
            const Interval sq = t * t;
            Interval v[kCols];
            v[kMass] = t;
            v[kNegent] = xlog2inv(t);
            v[kSq] = sq;
            v[kCube] = sq * t;
            v[kSqNegent] = t * xlog2inv(t);
            v[kDistinct] = d;
            v[kDistinctLog] = d * lg;
            v[kReocc] = w;
            v[kReoccLog] = w * lg;
            const long double mm = mult;
            c += mm;
            for (int k = 0; k < kCols; ++k) {
                acc_lo[k] += v[k].lo * mm;
                acc_hi[k] += v[k].hi * mm;
                acc_abs[k] += std::max(std::fabs(v[k].lo), std::fabs(v[k].hi)) * mm;
            }
            theta_.push_back(t.mid());
            push_all();
        },
        false);
    total_ = static_cast<double>(c);
    const long double ue = std::numeric_limits<long double>::epsilon();
    const long double terms = static_cast<long double>(cum_.size()) + 2;
    for (int k = 0; k < kCols; ++k) cols_[k].err = static_cast<double>(terms * ue * acc_abs[k]);
    floor_ = floor_theta;
    built_ = true;
}

double HeadTable::count_above(double x) const {
    if (x >= 1.0) return 0.0;
    if (!built_) return dist_.band_count(std::max(0.0, x), 1.0);
    if (x >= floor_) {
        // entries are sorted by decreasing theta
        auto it = std::partition_point(theta_.begin(), theta_.end(), [x](double t) { return t > x; });
        return cum_[static_cast<std::size_t>(it - theta_.begin())];
    }
    return total_ + dist_.band_count(std::max(0.0, x), floor_);
}

std::size_t HeadTable::entry_at(double count) const {
    auto it = std::lower_bound(cum_.begin(), cum_.end(), count);
    if (it == cum_.end()) return cum_.size() - 1;
    return static_cast<std::size_t>(it - cum_.begin());
}

double HeadTable::theta_at(double pos) const {
    auto it = std::upper_bound(cum_.begin(), cum_.end(), pos);
    if (it == cum_.begin() || it == cum_.end()) throw DomainError("theta_at: rank outside the table");
    return theta_[static_cast<std::size_t>(it - cum_.begin()) - 1];
}

Interval HeadTable::diff(const Column& c, std::size_t a, std::size_t b) const {
    if (b <= a) return Interval(0.0);
    const double lo = c.lo[b] - c.lo[a];
    const double hi = c.hi[b] - c.hi[a];
    const double slack = c.err + 2 * std::numeric_limits<double>::epsilon() * (std::fabs(c.hi[b]) + std::fabs(c.lo[b]));
    if (slack == 0 && lo == 0 && hi == 0) return Interval(0.0);
    return {round_down(lo - slack), round_up(hi + slack)};
}

HeadTable::Sums HeadTable::span(double from, double to) const {
    Sums s;
    if (to > total_) {
        s.complete = false;
        to = total_;
    }
    if (!(to > from)) return s;
    const std::size_t a = entry_at(from), b = entry_at(to);
    s.count = cum_[b] - cum_[a];
    s.entries = b - a;
    auto nonneg = [](Interval v) {
        v.lo = std::max(0.0, v.lo);
        return v;
    };
    s.mass = nonneg(diff(cols_[kMass], a, b));
    s.neg_entropy = nonneg(diff(cols_[kNegent], a, b));
    s.sq_mass = nonneg(diff(cols_[kSq], a, b));
    s.cube_mass = nonneg(diff(cols_[kCube], a, b));
    s.sq_neg_entropy = nonneg(diff(cols_[kSqNegent], a, b));
    s.distinct = nonneg(diff(cols_[kDistinct], a, b));
    s.distinct_log = nonneg(diff(cols_[kDistinctLog], a, b));
    s.reoccurrence = diff(cols_[kReocc], a, b);
    s.reoccurrence_log = diff(cols_[kReoccLog], a, b);
    return s;
}

HeadTable::Sums HeadTable::band(double lo, double hi) const {
    if (!(hi > lo)) return Sums{};
    const double c_hi = count_above(hi);
    const double c_lo = count_above(lo);
    Sums s = span(c_hi, c_lo);
    if (c_lo > total_) s.complete = false;
    return s;
}

Interval HeadTable::sum(SumKind kind, double lo, double hi) const {
    if (!(hi > lo)) return Interval(0.0);
    auto pick = [kind](const Sums& s) {
        switch (kind) {
            case SumKind::mass:
                return s.mass;
            case SumKind::sq:
                return s.sq_mass;
            case SumKind::cube:
                return s.cube_mass;
            case SumKind::neg_entropy:
                return s.neg_entropy;
            case SumKind::sq_neg_entropy:
                return s.sq_neg_entropy;
        }
        return s.mass;
    };
    if (lo >= floor_) return pick(band(lo, hi));
    const Interval upper = hi > floor_ ? pick(band(floor_, hi)) : Interval(0.0);
    Interval lower = dist_.band_sum(kind, lo, std::min(hi, floor_));
    Interval out = upper + lower;
    if (kind == SumKind::mass && lo <= 0.0 && hi >= floor_) {
        // complement of the tabulated head above hi
        const Interval both = intersect(out, Interval(1.0) - band(hi, 1.0).mass);
        if (both.valid()) out = both;
    }
    return intersect(out, Interval(0.0, kind == SumKind::mass ? 1.0 : out.hi));
}

// ---------------------------------------------------------------------------

Interval band_distinct(const HeadTable& table, double lo, double hi, double count, const Interval& mass,
                       const Interval& sq_mass, const Interval& cube_mass) {
    if (!(hi > lo) || count == 0) return Interval(0.0);
    const double n = table.n();
    const Interval nphi = Interval(n) * mass;
    const double cap = std::min(count, nphi.hi);
    if (table.covers(lo)) {
        const Interval exact = table.band(lo, hi).distinct;
        return Interval(std::max(0.0, exact.lo), std::min(exact.hi, cap));
    }
    const Interval c2 = Interval(n) * Interval(n - 1.0) / Interval(2.0);
    const Interval c3 = c2 * Interval(n - 2.0) / Interval(3.0);
    const Interval lower = nphi - c2 * sq_mass;
    const Interval upper = lower + c3 * cube_mass;
    return Interval(std::max(0.0, lower.lo), std::min(upper.hi, cap));
}

namespace {

BinStat make_bin(const HeadTable& table, double lo, double hi) {
    BinStat s;
    s.lo = lo;
    s.hi = hi;
    if (!(hi > lo)) return s;
    const BandStats st = table.dist().range_stats(lo, hi);
    s.count = st.count.hi;
    s.mass = st.mass;
    s.sq_mass = st.sq_mass;
    s.cube_mass = st.cube_mass;
    s.neg_entropy_mass = st.neg_entropy_mass;
    s.distinct = band_distinct(table, lo, hi, s.count, s.mass, s.sq_mass, s.cube_mass);
    return s;
}

}  // namespace

BinStats bin_stats(const HeadTable& table, const EtaGrid& grid) {
    BinStats out;
    out.n = grid.n;
    for (std::int64_t b = 0; b <= grid.B; ++b) out.bins.push_back(make_bin(table, grid.point(b), grid.point(b + 1)));
    out.k01 = out.bins[0].count + out.bins[1].count;
    out.phi0 = out.bins[0].mass;
    out.phi1 = out.bins[1].mass;
    out.phi01 = intersect(table.dist().band_sum(SumKind::mass, 0.0, grid.point(2)), out.phi0 + out.phi1);
    out.L01 = out.bins[0].distinct + out.bins[1].distinct;
    return out;
}

BinStats bin_stats(const HeadTable& table, const XiGrid& grid) {
    BinStats out;
    out.n = grid.n;
    for (std::int64_t b = 0; b <= grid.B; ++b) out.bins.push_back(make_bin(table, grid.point(b), grid.point(b + 1)));
    const Distribution& d = table.dist();
    for (std::int64_t b = 1; b <= grid.B; ++b) {
        auto& bin = out.bins[static_cast<std::size_t>(b)];
        if (bin.count == 0) continue;
        const double lo = b == 1 ? grid.point(1) : grid.point(b - 1);
        const double hi = grid.point(std::min(b + 2, grid.B + 1));
        bin.count_prime = d.band_count(lo, hi);
    }
    out.k01 = out.bins[0].count;
    out.phi01 = out.bins[0].mass;
    out.phi0 = out.phi01;
    out.phi1 = Interval(0.0);
    out.L01 = out.bins[0].distinct;
    return out;
}

BinStats bin_stats(const Distribution& dist, const EtaGrid& grid) { return bin_stats(HeadTable(dist, grid.n), grid); }
BinStats bin_stats(const Distribution& dist, const XiGrid& grid) { return bin_stats(HeadTable(dist, grid.n), grid); }

}  // namespace pattent
