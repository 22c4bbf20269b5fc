#include "pattent/general_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "pattent/parallel.hpp"

namespace pattent {

const char* to_string(S1Variant v) {
    switch (v) {
        case S1Variant::b0:
            return "b0";
        case S1Variant::b1:
            return "b1";
        case S1Variant::b2:
            return "b2";
    }
    return "?";
}
const char* to_string(S2Variant v) {
    switch (v) {
        case S2Variant::none:
            return "none";
        case S2Variant::exact_mean:
            return "exact-mean";
        case S2Variant::b1:
            return "b1";
        case S2Variant::b2:
            return "b2";
    }
    return "?";
}
const char* to_string(S4Variant v) { return v == S4Variant::binary_entropy ? "nh2" : "binomial"; }
const char* to_string(RVariant v) {
    switch (v) {
        case RVariant::none:
            return "none";
        case RVariant::Rb:
            return "Rb";
        case RVariant::R0:
            return "R0";
    }
    return "?";
}
const char* to_string(Packing p) { return p == Packing::separate_bins ? "separate" : "merged"; }

double separation_exponent(double theta_minus, double theta_plus) {
    auto g = [](double t) {
        const double r = (t - 1.0) / std::log(t);
        return r * std::log(r / kE) + 1.0;
    };
    return std::min(g(theta_minus), g(theta_plus));
}

double default_eps_base(double n) {
    const double ln = std::log(n);
    const double v = ln > 1.0 ? std::log(ln) / ln : 0.0;
    return std::max(v, 0.1);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kU = std::numeric_limits<double>::epsilon();

double up(double x) { return round_up(x + std::fabs(x) * 4 * kU); }
double down(double x) { return round_down(x - std::fabs(x) * 4 * kU); }

// Occupied bins among the tabulated symbols with theta > point(bmin), from
// the largest probability down. fn(b, first_rank, end_rank).
template <class Point, class BinOf, class Fn>
void walk_bins(const HeadTable& t, std::int64_t bmin, std::int64_t top, Point point, BinOf bin_of, Fn fn) {
    const double end = t.count_above(point(bmin));
    double pos = 0;
    while (pos < end) {
        std::int64_t b = std::clamp<std::int64_t>(bin_of(t.theta_at(pos)), bmin, top);
        for (int it = 0; it < 64 && b > bmin && t.count_above(point(b)) <= pos; ++it) --b;
        for (int it = 0; it < 64 && b < top && t.count_above(point(b + 1)) > pos; ++it) ++b;
        const double c = t.count_above(point(b));
        if (!(c > pos) || (b < top && t.count_above(point(b + 1)) > pos)) {
            throw InfeasibleError("grid", "bin boundaries are not resolvable in double precision");
        }
        fn(b, pos, c);
        pos = c;
    }
}

// ---------------------------------------------------------------------------
// Lower bound stages

struct LbEpsStage {
    double eps = 0, xi1 = 0;
    double K = 0, k01 = 0;
    Interval phi01, lphi, H01, L01;
    double S1 = 0, S1_b0 = 0, S1_b1 = 0, S1_b2 = 0;
    S1Variant s1_variant = S1Variant::b0;
    double eps_n = 0;
    double S2_exact = NAN, S2_b1 = NAN;
    double S3 = 0;
    double S4 = 0;
    S4Variant s4_variant = S4Variant::binary_entropy;
    double k_minus = 0, k_plus = 0, eps_prime = 0, f = 0;
};

double h2_small(double e) { return binary_entropy(std::min(e, 0.5)); }

LbEpsStage lb_eps_stage(const HeadTable& t, double eps, double tm, double tp) {
    const double n = t.n();
    LbEpsStage st;
    st.eps = eps;
    const XiGrid g = build_xi_grid(n, eps);
    st.xi1 = std::min(1.0, std::pow(n, -(1.0 - eps)));
    if (!t.covers(st.xi1)) throw InfeasibleError("H01", "symbols above 1/n^(1-eps) exceed the enumeration cap");
    st.K = t.count_above(st.xi1);
    st.k01 = t.dist().infinite_support() ? kInf : t.dist().support_size() - st.K;
    const HeadTable::Sums head = t.band(st.xi1, 1.0);
    st.phi01 = clamp(intersect(t.sum(SumKind::mass, 0.0, st.xi1), Interval(1.0) - head.mass), 0.0, 1.0);
    if (st.k01 == 0) st.phi01 = Interval(0.0);
    st.lphi = log2(st.phi01);
    st.H01 = xlog2inv(st.phi01) + head.neg_entropy;

    // S1
    st.S1_b0 = log_factorial(st.K).hi;
    st.eps_n = std::min(1.0, up(n * st.K * std::exp(-0.1 * std::pow(n, eps))));
    std::map<std::int64_t, double> kappa;
    if (st.K > 0 && g.B >= 1) {
        const double N = std::pow(n, 1.0 - eps);
        walk_bins(
            t, 1, g.B, [&](std::int64_t b) { return g.point(b); },
            [&](double th) { return static_cast<std::int64_t>(std::ceil(std::sqrt(th * N))) - 1; },
            [&](std::int64_t b, double from, double to) { kappa[b] = to - from; });
    }
    long double sk = 0, skp = 0;
    for (const auto& [b, k] : kappa) {
        if (b > g.A) continue;
        sk += log_factorial(k).hi;
        double kp = k;
        auto at = [&](std::int64_t i) {
            auto it = kappa.find(i);
            return it == kappa.end() ? 0.0 : it->second;
        };
        kp += at(b + 1);
        if (b >= 2) kp += at(b - 1);
        skp += log_factorial(kp).hi;
    }
    const double en = st.eps_n;
    const double tail = en * st.S1_b0 + h2_small(en);
    st.S1_b1 = up((1.0 - en) * up(static_cast<double>(sk) + st.K * std::log2(3.0)) + tail);
    st.S1_b2 = up((1.0 - en) * up(static_cast<double>(skp)) + tail);
    st.S1 = st.S1_b0;
    st.s1_variant = S1Variant::b0;
    if (st.S1_b1 < st.S1) {
        st.S1 = st.S1_b1;
        st.s1_variant = S1Variant::b1;
    }
    if (st.S1_b2 < st.S1) {
        st.S1 = st.S1_b2;
        st.s1_variant = S1Variant::b2;
    }

    // Whole-bin S2 variants need every bin-01 symbol tabulated.
    const HeadTable::Sums bin01 = t.band(0.0, st.xi1);
    const bool enumerable = bin01.complete && t.covers(0.0);
    if (enumerable && st.k01 > 0 && st.phi01.hi > 0 && std::isfinite(st.lphi.lo)) {
        const Interval nI(n);
        const Interval exact = st.lphi * (nI * bin01.mass - bin01.distinct) + (nI * bin01.neg_entropy - bin01.distinct_log);
        st.S2_exact = std::max(0.0, exact.lo);
        const Interval b1 = st.lphi * bin01.reoccurrence + bin01.reoccurrence_log;
        st.S2_b1 = n > 3 ? std::max(0.0, b1.lo) : b1.lo;
    }

    // S3: smallest probabilities first, finite support only
    const Interval sq01 = t.sum(SumKind::sq, 0.0, st.xi1);
    const Interval cube01 = t.sum(SumKind::cube, 0.0, st.xi1);
    st.L01 = band_distinct(t, 0.0, st.xi1, st.k01, st.phi01, sq01, cube01);
    if (!t.dist().infinite_support() && st.L01.lo >= 2.0 && st.phi01.hi > 0) {
        const double M = std::floor(st.L01.lo) - 1.0;
        const double L = st.L01.lo;
        long double acc = 0;
        double i0 = 0;
        try {
            t.dist().visit_band(
                0.0, st.xi1,
                [&](const Interval& th, double mult) {
                    if (i0 >= M) return;
                    const double j = std::min(mult, M - i0);
                    // sum_{i=i0+1}^{i0+j} (L - i)
                    const long double w = static_cast<long double>(j) * L - static_cast<long double>(j) * (2 * i0 + j + 1) / 2;
                    acc += w * th.lo;
                    i0 += j;
                },
                true);
            st.S3 = std::max(0.0, down(down(static_cast<double>(acc) * kLog2e) / st.phi01.hi) * (1 - 1e-12));
        } catch (const TooLargeError&) {
            st.S3 = 0.0;
        }
    }

    // S4
    st.f = separation_exponent(tm, tp);
    const double kbig = t.count_above(std::pow(n, -3.0));
    const double last = std::log(tm) / (2.0 * (tm - 1.0) * std::pow(n, 1.0 + eps));
    st.eps_prime = std::clamp(up(n * kbig * std::exp(-st.f * std::pow(n, eps)) + last), 0.0, 1.0);
    st.k_minus = t.count(tm * st.xi1, st.xi1);
    st.k_plus = t.count(st.xi1, std::min(1.0, tp * st.xi1));
    const double ep = st.eps_prime;
    const double binom = log2_binomial(st.k_minus + st.k_plus, st.k_plus).hi;
    const double s4b = up(up((1.0 - ep) * binom) + ep * n + h2_small(ep));
    const double s4a = up(n * binary_entropy(st.phi01).hi);
    if (st.phi01.hi == 0.0) {
        // no small symbols to separate
        st.S4 = 0.0;
        st.s4_variant = S4Variant::binary_entropy;
    } else if (s4b < s4a) {
        st.S4 = s4b;
        st.s4_variant = S4Variant::binomial;
    } else {
        st.S4 = s4a;
        st.s4_variant = S4Variant::binary_entropy;
    }
    return st;
}

struct LbEps0Stage {
    double eps0 = 0, eta1 = 0;
    Interval sq0, sqn0;
};

LbEps0Stage lb_eps0_stage(const HeadTable& t, double eps0) {
    LbEps0Stage s;
    s.eps0 = eps0;
    s.eta1 = std::pow(t.n(), -(1.0 + eps0));
    s.sq0 = t.sum(SumKind::sq, 0.0, s.eta1);
    s.sqn0 = t.sum(SumKind::sq_neg_entropy, 0.0, s.eta1);
    return s;
}

LowerBoundBreakdown lb_assemble(const HeadTable& t, const LbEpsStage& a, const LbEps0Stage& z, double tm, double tp) {
    const double n = t.n();
    LowerBoundBreakdown r;
    r.n = n;
    r.eps = a.eps;
    r.eps0 = z.eps0;
    r.theta_minus = tm;
    r.theta_plus = tp;
    r.k_head = a.K;
    r.k01 = a.k01;
    r.phi01 = a.phi01;
    r.L01 = a.L01;
    r.H01 = a.H01;
    r.S1 = a.S1;
    r.s1_variant = a.s1_variant;
    r.S1_b0 = a.S1_b0;
    r.S1_b1 = a.S1_b1;
    r.S1_b2 = a.S1_b2;
    r.eps_n = a.eps_n;
    r.S3 = a.S3;
    r.S4 = a.S4;
    r.s4_variant = a.s4_variant;
    r.k_theta_minus = a.k_minus;
    r.k_theta_plus = a.k_plus;
    r.eps_prime_n = a.eps_prime;
    r.f_value = a.f;
    r.S2_exact = a.S2_exact;
    r.S2_b1 = a.S2_b1;

    // S2 b2: quadratic form on bin 0, exact summand on (eta1, xi1]
    if (a.phi01.hi > 0 && a.k01 > 0 && std::isfinite(a.lphi.lo)) {
        const double c = 1.0 - 1.0 / (3.0 * std::pow(n, z.eps0)) - 2.0 / n;
        Interval X = a.lphi * z.sq0 + z.sqn0;
        X.lo = std::max(0.0, X.lo);
        const Interval part0 = Interval(c).widened(2) * Interval(n * n / 2.0).widened(1) * X;
        const HeadTable::Sums mid = t.band(z.eta1, a.xi1);
        if (mid.complete || n > 3) {
            Interval part1 = a.lphi * mid.reoccurrence + mid.reoccurrence_log;
            if (n > 3) part1.lo = std::max(0.0, part1.lo);
            const double v = (part0 + part1).lo;
            if (std::isfinite(v)) r.S2_b2 = v;
        }
    }
    r.S2 = 0.0;
    r.s2_variant = S2Variant::none;
    auto consider = [&](double v, S2Variant tag) {
        if (std::isfinite(v) && v > r.S2) {
            r.S2 = v;
            r.s2_variant = tag;
        }
    };
    consider(r.S2_exact, S2Variant::exact_mean);
    consider(r.S2_b1, S2Variant::b1);
    consider(r.S2_b2, S2Variant::b2);

    const double nh = (Interval(n) * a.H01).lo;
    const long double lb = static_cast<long double>(nh) - r.S1 + r.S2 + r.S3 - r.S4;
    const double mag = std::fabs(nh) + r.S1 + r.S2 + r.S3 + r.S4;
    r.LB = mag == 0 ? 0.0 : round_down(static_cast<double>(lb) - 8 * kU * mag);
    return r;
}

void check_lb_params(double n, double eps, double eps0, double tm, double tp) {
    if (!(n >= 2)) throw DomainError("lower bound: need n >= 2");
    if (!(eps > 0)) throw DomainError("lower bound: need eps > 0");
    if (!(eps0 >= 0)) throw DomainError("lower bound: need eps0 >= 0");
    if (!(tp > 1.0 && 1.0 > tm && tm > 0.0)) throw DomainError("lower bound: need theta+ > 1 > theta- > 0");
}

// ---------------------------------------------------------------------------
// Upper bound stages

struct UbSmall {
    double eps0 = 0, eps1 = 0, eta1 = 0, eta2 = 0;
    Interval phi0, phi1, phi01, head_negent;
    double k0 = 0, k1 = 0, k01 = 0;
    Interval sq0, sq1, sq01, L0, L1, L01;
};

UbSmall ub_small(const HeadTable& t, double eps0, double eps1) {
    const double n = t.n();
    UbSmall s;
    s.eps0 = eps0;
    s.eps1 = eps1;
    s.eta1 = std::pow(n, -(1.0 + eps0));
    s.eta2 = std::pow(n, -(1.0 + eps1));
    if (!t.covers(s.eta2)) throw InfeasibleError("U", "symbols above eta_2 exceed the enumeration cap");
    const HeadTable::Sums head = t.band(s.eta2, 1.0);
    s.head_negent = head.neg_entropy;
    s.phi0 = clamp(t.sum(SumKind::mass, 0.0, s.eta1), 0.0, 1.0);
    s.phi01 = clamp(intersect(t.sum(SumKind::mass, 0.0, s.eta2), Interval(1.0) - head.mass), 0.0, 1.0);
    Interval phi1 = intersect(t.sum(SumKind::mass, s.eta1, s.eta2), s.phi01 - s.phi0);
    if (!phi1.valid()) phi1 = t.sum(SumKind::mass, s.eta1, s.eta2);
    s.phi1 = clamp(phi1, 0.0, 1.0);
    const double total = t.dist().infinite_support() ? kInf : t.dist().support_size();
    const double above1 = t.count_above(s.eta1), above2 = t.count_above(s.eta2);
    s.k0 = total - above1;
    s.k1 = above1 - above2;
    s.k01 = total - above2;
    if (s.k0 == 0) s.phi0 = Interval(0.0);
    if (s.k1 == 0) s.phi1 = Interval(0.0);
    if (s.k01 == 0) s.phi01 = Interval(0.0);
    s.sq0 = t.sum(SumKind::sq, 0.0, s.eta1);
    s.sq1 = t.sum(SumKind::sq, s.eta1, s.eta2);
    s.sq01 = s.sq0 + s.sq1;
    const Interval cube0 = t.sum(SumKind::cube, 0.0, s.eta1);
    const Interval cube1 = t.sum(SumKind::cube, s.eta1, s.eta2);
    s.L0 = band_distinct(t, 0.0, s.eta1, s.k0, s.phi0, s.sq0, cube0);
    s.L1 = band_distinct(t, s.eta1, s.eta2, s.k1, s.phi1, s.sq1, cube1);
    s.L01 = band_distinct(t, 0.0, s.eta2, s.k01, s.phi01, s.sq01, cube0 + cube1);
    if (!s.L01.valid()) s.L01 = s.L0 + s.L1;
    return s;
}

struct UbFirst {
    double first = 0, correction = 0;
};

UbFirst ub_first(const HeadTable& t, const EtaGrid& g) {
    const double n = t.n();
    UbFirst u;
    const double N = std::pow(n, 1.0 + g.eps2);
    long double first = 0, corr = 0;
    walk_bins(
        t, 2, g.B, [&](std::int64_t b) { return g.point(b); },
        [&](double th) {
            const double bp = std::ceil(std::sqrt(th * N)) - 1.0;
            return static_cast<std::int64_t>(bp - g.shift + 2.0);
        },
        [&](std::int64_t b, double from, double to) {
            const HeadTable::Sums s = t.span(from, to);
            const double kb = s.count;
            if (b <= g.A) {
                const Interval L = s.distinct;
                // min of the convex L log2(L/e) over the L interval
                auto f = [](double x) { return x <= 0 ? 0.0 : x * (std::log2(x) - kLog2e); };
                double t1 = (L.lo <= 1.0 && 1.0 <= L.hi) ? -kLog2e : std::min(f(L.lo), f(L.hi));
                t1 = down(t1);
                // smallest tabulated theta in the bin, guarded for interval-valued pmfs
                const double tmin =
                    to <= t.total() ? std::max(g.point(b), t.theta_at(to - 1.0) * (1.0 - 1e-12)) : g.point(b);
                const double scale = 1.0 - std::min(1.0, up(kb * std::exp(-n * tmin)));
                const double t2 = down(scale * log_factorial(kb).lo);
                first += std::max({0.0, t1, t2});
            }
            if (kb > 1 && s.entries > 1) {
                const double bp = g.bprime(b);
                const double c = (2.0 + 1.0 / bp) * (2.0 + 1.0 / bp);
                corr += up(c * kLog2e * kb / std::pow(n, g.eps2));
            }
        });
    u.first = down(static_cast<double>(first) * (1 - 1e-14));
    u.correction = up(static_cast<double>(corr) * (1 + 1e-14));
    return u;
}

double rb_upper(double n, const Interval& phi, const Interval& L, double k) {
    const double nphi = (Interval(n) * phi).hi;
    if (!(nphi > 0)) return 0.0;
    const double m = std::max(1.0, std::min(k, n));
    const double logm = up(std::log2(m));
    double lo = std::max(0.0, L.lo), hi = std::min(L.hi, nphi);
    if (lo > hi) lo = hi;
    const double ls = std::clamp(nphi / (m + 1.0), lo, hi);
    const double v = (nphi - ls) * logm + nphi * binary_entropy(std::clamp(ls / nphi, 0.0, 1.0));
    return up(v * (1 + 1e-12));
}

double r0_upper(double n, const Interval& phi, const Interval& sq, double k) {
    if (!(sq.hi > 0) || !(phi.hi > 0)) return 0.0;
    const double m = std::max(1.0, std::min(k, n));
    const double C = 2.0 * kE * phi.hi * m / n;
    const double s = std::clamp(C / kE, sq.lo, sq.hi);
    if (!(s > 0)) return 0.0;
    const double v = n * n / 2.0 * s * std::log2(C / s);
    return up(v * (1 + 1e-12) + 1e-300);
}

UpperBoundBreakdown ub_assemble(const HeadTable& t, const UbSmall& s, const EtaGrid& g, const UbFirst& u,
                                Packing packing) {
    const double n = t.n();
    UpperBoundBreakdown r;
    r.n = n;
    r.eps0 = s.eps0;
    r.eps1 = s.eps1;
    r.eps2 = g.eps2;
    r.packing = packing;
    r.phi0 = s.phi0;
    r.phi1 = s.phi1;
    r.phi01 = s.phi01;
    r.U_first = u.first;
    r.U_correction = u.correction;
    r.U = std::max(0.0, down(u.first - u.correction));
    const bool r0_ok = s.eps1 >= 0.0;
    auto best = [&](const Interval& phi, const Interval& L, const Interval& sq, double k, bool allow_r0, RVariant& tag) {
        double v = rb_upper(n, phi, L, k);
        tag = RVariant::Rb;
        if (allow_r0) {
            const double w = r0_upper(n, phi, sq, k);
            if (w < v) {
                v = w;
                tag = RVariant::R0;
            }
        }
        return v;
    };
    double R = 0;
    if (packing == Packing::separate_bins) {
        r.H_packed = xlog2inv(s.phi0) + xlog2inv(s.phi1) + s.head_negent;
        r.R0 = best(s.phi0, s.L0, s.sq0, s.k0, true, r.r0_variant);
        r.R1 = best(s.phi1, s.L1, s.sq1, s.k1, r0_ok, r.r1_variant);
        R = up(r.R0 + r.R1);
    } else {
        r.H_packed = xlog2inv(s.phi01) + s.head_negent;
        r.R01 = best(s.phi01, s.L01, s.sq01, s.k01, r0_ok, r.r01_variant);
        R = r.R01;
    }
    const double nh = (Interval(n) * r.H_packed).hi;
    const long double ub = static_cast<long double>(nh) - r.U + R;
    const double mag = std::fabs(nh) + r.U + R;
    r.UB = mag == 0 ? 0.0 : round_up(static_cast<double>(ub) + 8 * kU * mag);
    return r;
}

// 0 <= H(pattern) <= n H(X) always hold; apply them to the reported value.
void clamp_trivial(const HeadTable&, LowerBoundBreakdown& r) { r.LB = std::max(0.0, r.LB); }
void clamp_trivial(const HeadTable& t, UpperBoundBreakdown& r) {
    const IidEntropy h = t.dist().iid_entropy();
    if (!h.infinite) r.UB = std::min(r.UB, (Interval(t.n()) * h.bits).hi);
    r.UB = std::max(0.0, r.UB);
}

}  // namespace

LowerBoundBreakdown lower_bound_general(const HeadTable& table, double eps, double eps0, double theta_minus,
                                        double theta_plus) {
    check_lb_params(table.n(), eps, eps0, theta_minus, theta_plus);
    const LbEpsStage a = lb_eps_stage(table, eps, theta_minus, theta_plus);
    LowerBoundBreakdown r = lb_assemble(table, a, lb_eps0_stage(table, eps0), theta_minus, theta_plus);
    clamp_trivial(table, r);
    return r;
}

LowerBoundBreakdown lower_bound_general(const Distribution& dist, double n, double eps, double eps0,
                                        double theta_minus, double theta_plus) {
    return lower_bound_general(HeadTable(dist, n), eps, eps0, theta_minus, theta_plus);
}

UpperBoundBreakdown upper_bound_general(const HeadTable& table, double eps0, double eps1, double eps2,
                                        Packing packing) {
    const EtaGrid g = build_eta_grid(table.n(), eps0, eps1, eps2);
    const UbSmall s = ub_small(table, eps0, eps1);
    UpperBoundBreakdown r = ub_assemble(table, s, g, ub_first(table, g), packing);
    clamp_trivial(table, r);
    return r;
}

UpperBoundBreakdown upper_bound_general(const Distribution& dist, double n, double eps0, double eps1, double eps2,
                                        Packing packing) {
    return upper_bound_general(HeadTable(dist, n), eps0, eps1, eps2, packing);
}

// ---------------------------------------------------------------------------
// Search

namespace {

std::vector<double> steps(double from, double to, double step) {
    std::vector<double> v;
    for (int i = 0;; ++i) {
        const double x = from + i * step;
        if (x > to + 1e-12) break;
        v.push_back(std::round(x * 1e9) / 1e9);
    }
    return v;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ParseError("search spec: bad number '" + item + "'");
        }
        if (used != item.size()) throw ParseError("search spec: bad number '" + item + "'");
        v.push_back(x);
    }
    return v;
}

std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(12);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

}  // namespace

ParamSearchSpec ParamSearchSpec::defaults(double n) {
    ParamSearchSpec s;
    s.eps_base = default_eps_base(n);
    s.eps_coeffs = steps(0.25, 4.0, 0.25);
    s.eps0_values = steps(0.0, 1.0, 0.05);
    s.ub_eps0_values = steps(0.05, 1.0, 0.05);
    s.ub_eps2_coeffs = steps(0.0, 4.0, 0.25);
    const double ln = std::log(n);
    s.eps1_values = {0.0};
    if (ln > 1.0 && std::log(ln) > 1.0) {
        const double lll = std::log(std::log(ln)) / ln;
        for (int j = 1; j <= 2; ++j) s.eps1_values.push_back(j * lll);
    }
    s.packings = {Packing::separate_bins, Packing::merged_bin};
    s.jobs = default_jobs();
    return s;
}

ParamSearchSpec ParamSearchSpec::parse(std::string_view text, double n) {
    ParamSearchSpec s = defaults(n);
    std::string t(text);
    std::replace(t.begin(), t.end(), '\n', ';');
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto b = item.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        item = item.substr(b);
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("search spec: expected key=value, got '" + item + "'");
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        val.erase(0, val.find_first_not_of(" \t"));
        val.erase(val.find_last_not_of(" \t\r") + 1);
        if (key == "eps_base") {
            s.eps_base = parse_list(val).at(0);
        } else if (key == "eps_coeffs") {
            s.eps_coeffs = parse_list(val);
        } else if (key == "eps0") {
            s.eps0_values = parse_list(val);
        } else if (key == "eps_extra") {
            s.eps_extra = parse_list(val);
        } else if (key == "theta_minus") {
            s.theta_minus = parse_list(val).at(0);
        } else if (key == "theta_plus") {
            s.theta_plus = parse_list(val).at(0);
        } else if (key == "eps1") {
            s.eps1_values = parse_list(val);
        } else if (key == "ub_eps0") {
            s.ub_eps0_values = parse_list(val);
        } else if (key == "ub_eps2_coeffs") {
            s.ub_eps2_coeffs = parse_list(val);
        } else if (key == "packing") {
            if (val == "separate") {
                s.packings = {Packing::separate_bins};
            } else if (val == "merged") {
                s.packings = {Packing::merged_bin};
            } else if (val == "both") {
                s.packings = {Packing::separate_bins, Packing::merged_bin};
            } else {
                throw ParseError("search spec: packing must be separate, merged or both");
            }
        } else if (key == "jobs") {
            s.jobs = static_cast<unsigned>(std::max(1.0, parse_list(val).at(0)));
        } else {
            throw ParseError("search spec: unknown key '" + key + "'");
        }
    }
    return s;
}

std::string ParamSearchSpec::serialize() const {
    std::ostringstream os;
    os.precision(12);
    os << "eps_base=" << eps_base << ";eps_coeffs=" << join(eps_coeffs) << ";eps0=" << join(eps0_values);
    if (!eps_extra.empty()) os << ";eps_extra=" << join(eps_extra);
    os << ";theta_minus=" << theta_minus << ";theta_plus=" << theta_plus << ";eps1=" << join(eps1_values)
       << ";ub_eps0=" << join(ub_eps0_values) << ";ub_eps2_coeffs=" << join(ub_eps2_coeffs) << ";packing=";
    if (packings.size() == 2) {
        os << "both";
    } else if (!packings.empty()) {
        os << to_string(packings[0]);
    }
    os << ";jobs=" << jobs;
    return os.str();
}

LowerOptimum optimize_lower(const HeadTable& table, const ParamSearchSpec& search) {
    const double n = table.n();
    const double base = search.eps_base > 0 ? search.eps_base : default_eps_base(n);
    std::vector<double> eps;
    for (double c : search.eps_coeffs) eps.push_back(c * base);
    for (double e : search.eps_extra) eps.push_back(e);
    std::sort(eps.begin(), eps.end());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    eps.erase(std::remove_if(eps.begin(), eps.end(), [](double e) { return !(e > 0); }), eps.end());
    std::vector<double> eps0 = search.eps0_values;
    std::sort(eps0.begin(), eps0.end());
    eps0.erase(std::unique(eps0.begin(), eps0.end()), eps0.end());
    eps0.erase(std::remove_if(eps0.begin(), eps0.end(), [](double e) { return !(e >= 0); }), eps0.end());
    if (eps.empty() || eps0.empty()) throw InfeasibleError("optimizer", "empty lower-bound search grid");
    if (!(search.theta_plus > 1.0 && 1.0 > search.theta_minus && search.theta_minus > 0.0)) {
        throw DomainError("lower bound: need theta+ > 1 > theta- > 0");
    }
    check_lb_params(n, eps.front(), eps0.front(), search.theta_minus, search.theta_plus);

    std::vector<std::optional<LbEpsStage>> a(eps.size());
    std::vector<LbEps0Stage> z(eps0.size());
    parallel_for(eps.size() + eps0.size(), search.jobs, [&](std::size_t i) {
        if (i < eps.size()) {
            try {
                a[i] = lb_eps_stage(table, eps[i], search.theta_minus, search.theta_plus);
            } catch (const InfeasibleError&) {
            } catch (const DomainError&) {
            }
        } else {
            z[i - eps.size()] = lb_eps0_stage(table, eps0[i - eps.size()]);
        }
    });
    LowerOptimum out;
    bool have = false;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        for (std::size_t j = 0; j < eps0.size(); ++j) {
            ++out.evaluated;
            if (!a[i]) continue;
            const LowerBoundBreakdown r = lb_assemble(table, *a[i], z[j], search.theta_minus, search.theta_plus);
            if (!std::isfinite(r.LB)) continue;
            ++out.feasible;
            // eps and eps0 are visited in increasing order, so strict > keeps the smallest parameters on ties
            if (!have || r.LB > out.best.LB) {
                out.best = r;
                have = true;
            }
        }
    }
    if (!have) throw InfeasibleError("optimizer", "no feasible lower-bound parameter point");
    clamp_trivial(table, out.best);
    return out;
}

UpperOptimum optimize_upper(const HeadTable& table, const ParamSearchSpec& search) {
    const double n = table.n();
    const double base = search.eps_base > 0 ? search.eps_base : default_eps_base(n);
    auto sorted = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    const std::vector<double> e1 = sorted(search.eps1_values);
    const std::vector<double> e0 = sorted(search.ub_eps0_values);
    std::vector<double> c2 = sorted(search.ub_eps2_coeffs);
    std::vector<Packing> packs = search.packings;
    std::sort(packs.begin(), packs.end());
    if (e1.empty() || e0.empty() || c2.empty() || packs.empty()) {
        throw InfeasibleError("optimizer", "empty upper-bound search grid");
    }

    // (eps0, eps1) pairs and (eps1, eps2) grids are shared across the cross product
    std::vector<std::pair<double, double>> pairs;
    for (double a1 : e1) {
        for (double a0 : e0) {
            if (a0 > a1 && a0 >= 0) pairs.emplace_back(a0, a1);
        }
    }
    std::vector<std::pair<double, double>> grids;
    for (double a1 : e1) {
        std::vector<double> vals;
        for (double c : c2) vals.push_back(std::max(std::max(0.0, a1), c * base));
        for (double v : sorted(vals)) grids.emplace_back(a1, v);
    }
    std::vector<std::optional<UbSmall>> small(pairs.size());
    std::vector<std::optional<std::pair<EtaGrid, UbFirst>>> first(grids.size());
    parallel_for(pairs.size() + grids.size(), search.jobs, [&](std::size_t i) {
        try {
            if (i < pairs.size()) {
                small[i] = ub_small(table, pairs[i].first, pairs[i].second);
            } else {
                const auto& [a1, a2] = grids[i - pairs.size()];
                // eps0 only sets eta_1, which the first-occurrence term never reads
                const EtaGrid g = build_eta_grid(n, std::max(0.0, a1) + 1.0, a1, a2);
                first[i - pairs.size()] = std::make_pair(g, ub_first(table, g));
            }
        } catch (const InfeasibleError&) {
        } catch (const DomainError&) {
        }
    });

    using Key = std::tuple<double, double, double, int>;
    UpperOptimum out;
    bool have = false;
    Key best_key{};
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        for (std::size_t q = 0; q < grids.size(); ++q) {
            if (grids[q].first != pairs[p].second) continue;
            for (Packing pk : packs) {
                ++out.evaluated;
                if (!small[p] || !first[q]) continue;
                EtaGrid g = first[q]->first;
                g.eps0 = pairs[p].first;
                const UpperBoundBreakdown r = ub_assemble(table, *small[p], g, first[q]->second, pk);
                if (!std::isfinite(r.UB)) continue;
                ++out.feasible;
                const Key key{r.eps0, r.eps1, r.eps2, static_cast<int>(pk)};
                if (!have || r.UB < out.best.UB || (r.UB == out.best.UB && key < best_key)) {
                    out.best = r;
                    best_key = key;
                    have = true;
                }
            }
        }
    }
    if (!have) throw InfeasibleError("optimizer", "no feasible upper-bound parameter point");
    clamp_trivial(table, out.best);
    return out;
}

LowerOptimum optimize_lower(const Distribution& dist, double n, const ParamSearchSpec& search) {
    return optimize_lower(HeadTable(dist, n), search);
}

UpperOptimum optimize_upper(const Distribution& dist, double n, const ParamSearchSpec& search) {
    return optimize_upper(HeadTable(dist, n), search);
}

}  // namespace pattent
