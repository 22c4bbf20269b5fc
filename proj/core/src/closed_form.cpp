#include "pattent/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pattent/numerics.hpp"
#include "pattent/parallel.hpp"

namespace pattent {

const char* to_string(BoundMode m) {
    switch (m) {
        case BoundMode::asymptotic:
            return "asymptotic";
        case BoundMode::finite_n:
            return "finite_n";
        case BoundMode::general:
            return "general";
    }
    return "?";
}

BoundMode parse_mode(const std::string& s) {
    if (s == "asymptotic") return BoundMode::asymptotic;
    if (s == "finite_n") return BoundMode::finite_n;
    if (s == "general") return BoundMode::general;
    throw ParseError("unknown mode '" + s + "' (expected asymptotic, finite_n or general)");
}

namespace {

constexpr double kRel = 1e-12;

double lf(double m) { return m > 0 ? log_factorial(m).mid() : 0.0; }
double h2(double x) { return binary_entropy(x); }
double safe_down(double v, double mag) { return v - kRel * (std::fabs(mag) + 1.0); }
double safe_up(double v, double mag) { return v + kRel * (std::fabs(mag) + 1.0); }

unsigned jobs_of(const ClosedFormOptions& opt) { return opt.jobs ? opt.jobs : default_jobs(); }

ClosedFormResult base_result(const Distribution& d, double n, BoundMode mode) {
    ClosedFormResult r;
    r.family = d.name();
    r.params = d.params();
    r.n = n;
    r.mode = mode;
    const IidEntropy h = d.iid_entropy();
    r.iid_infinite = h.infinite;
    r.nHX = h.infinite ? Interval(std::numeric_limits<double>::infinity()) : Interval(n) * h.bits;
    return r;
}

// Leading terms can leave [0, nH] where the lower-order terms dominate.
double clip_trivial(double v, const ClosedFormResult& r) {
    if (std::isnan(v)) return v;
    v = std::max(0.0, v);
    if (!r.iid_infinite && std::isfinite(r.nHX.hi)) v = std::min(v, r.nHX.hi);
    return v;
}

void use_asymptotic(ClosedFormResult& r) {
    r.LB = clip_trivial(r.asymptotic_LB, r);
    r.UB = clip_trivial(r.asymptotic_UB, r);
    r.rigorous = false;
}

void attach(ClosedFormResult& r, const LowerOptimum& lo, const UpperOptimum& up) {
    r.lower = lo.best;
    r.upper = up.best;
    r.LB = lo.best.LB;
    r.UB = up.best.UB;
    r.aux["eps"] = lo.best.eps;
    r.aux["eps0"] = lo.best.eps0;
    r.aux["ub_eps0"] = up.best.eps0;
    r.aux["eps1"] = up.best.eps1;
    r.aux["eps2"] = up.best.eps2;
}

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end(), [](double x, double y) { return std::fabs(x - y) < 1e-12; }), a.end());
    return a;
}

// Default grid plus a neighborhood of width +-halfwidth (in units of the
// eps base) around the preferred coefficient.
ParamSearchSpec family_search(double n, double center, const ClosedFormOptions& opt) {
    ParamSearchSpec s = ParamSearchSpec::defaults(n);
    std::vector<double> extra;
    for (double c = std::max(0.1, center - opt.eps_halfwidth); c <= center + opt.eps_halfwidth + 1e-9; c += 0.1) {
        extra.push_back(std::round(c * 1e6) / 1e6);
    }
    s.eps_coeffs = merged(s.eps_coeffs, extra);
    s.jobs = jobs_of(opt);
    return s;
}

}  // namespace

ClosedFormResult general_bounds_result(const Distribution& dist, double n, const ParamSearchSpec& search) {
    ClosedFormResult r = base_result(dist, n, BoundMode::general);
    const HeadTable t(dist, n);
    attach(r, optimize_lower(t, search), optimize_upper(t, search));
    return r;
}

// ---------------------------------------------------------------------------
// Uniform

UniformRatePieces uniform_rate_pieces(double lambda, double n, const ClosedFormOptions& opt) {
    UniformRatePieces p;
    const double k = n / lambda;
    const double lp = std::max(1.0, lambda);
    // Expected number of distinct symbols, exact
    const double L = k * -std::expm1(n * std::log1p(-1.0 / k));
    const double Llo = L * (1 - 1e-13), Lhi = std::min(std::min(k, n), L * (1 + 1e-13));
    const double nlogk = n * std::log2(k);

    // Exact repetition/first-occurrence chain with Jensen on log (k - K)!
    {
        const double a = std::max(0.0, k - Lhi);
        p.code_LB = safe_down(nlogk - log_factorial(k).hi + log_factorial(a).lo, nlogk);
    }
    // Code with repeated-index probability lambda'/(alpha n)
    {
        const double m = n / lp;
        double best = std::numeric_limits<double>::infinity(), best_a = opt.alpha_min;
        const auto steps = static_cast<long>(std::floor((opt.alpha_max - opt.alpha_min) / opt.alpha_step + 1e-9));
        for (long i = 0; i <= steps; ++i) {
            const double alpha = opt.alpha_min + static_cast<double>(i) * opt.alpha_step;
            const double c = m * (alpha - 1.0);
            const double v = n * std::log2(alpha * n / lp) - (log_factorial(c + Llo).lo - log_factorial(c).hi);
            if (v < best) {
                best = v;
                best_a = alpha;
            }
        }
        p.code_UB = safe_up(best, n * std::log2(opt.alpha_max * n));
        p.alpha = best_a;
    }
    // binned route: S2 + S3 below, R'_1 above
    {
        const double lk = std::log2(k);
        const double s2 = k * (lambda - 1.0 + std::exp(-lambda - lambda * lambda / n)) * lk;
        const double M = std::floor(Llo) - 1.0;
        const double s3 = M >= 1 ? lambda * kLog2e / n * (M * Llo - M * (M + 1.0) / 2.0) : 0.0;
        p.binned_LB = safe_down(std::max(0.0, s2) + s3, s2 + s3);
        const double mm = std::min(n, k);
        const double ls = std::clamp(n / (mm + 1.0), Llo, Lhi);
        const double rb = (n - ls) * std::log2(mm) + n * h2(ls / n);
        p.binned_UB = safe_up(rb, rb);
    }
    return p;
}

namespace {

double uniform_asym_ub_coeff(double lambda, double alpha) {
    const double lp = std::max(1.0, lambda);
    const double g = (1.0 - std::exp(-lambda)) / lambda;
    const double am = alpha - 1.0;
    const double t = am > 0 ? am / lp * std::log2(am) : 0.0;
    return std::log2(alpha) + t - (am / lp + g) * std::log2(am + lp / lambda * (1.0 - std::exp(-lambda)));
}

ClosedFormResult uniform_common(const Distribution& d, double k, double n, const ClosedFormOptions& opt) {
    ClosedFormResult r = base_result(d, n, BoundMode::finite_n);
    if (k <= 1) {
        r.LB = r.UB = r.asymptotic_LB = r.asymptotic_UB = 0.0;
        r.regime = "large-prob";
        return r;
    }
    const double lambda = n / k;
    const double nH = n * std::log2(k);
    const Interval lk = log_factorial(k);
    const double L = k * -std::expm1(n * std::log1p(-1.0 / k));

    // Candidate bounds, each valid for every k; the result is their intersection.
    const double lb_large = safe_down(nH - lk.hi, nH);
    const double shrink = 1.0 - std::min(1.0, k * std::exp(-lambda) * (1 + 1e-12));
    const double u_first = std::max({0.0, shrink * lk.lo, L * (1 - 1e-13) * (std::log2(L) - kLog2e)});
    const double ub_large = safe_up(nH - u_first, nH);
    const UniformRatePieces pc = uniform_rate_pieces(lambda, n, opt);
    double ub_small = std::numeric_limits<double>::infinity();
    if (k >= n) ub_small = safe_up(n * lambda / 2.0 * std::log2(2.0 * kE * k), n * k);

    r.LB = std::max({0.0, lb_large, pc.code_LB, pc.binned_LB});
    r.UB = std::min({nH, ub_large, pc.code_UB, pc.binned_UB, ub_small});
    r.aux["alpha"] = pc.alpha;
    r.aux["code_LB"] = pc.code_LB;
    r.aux["code_UB"] = pc.code_UB;
    r.aux["binned_LB"] = pc.binned_LB;
    r.aux["binned_UB"] = pc.binned_UB;
    r.aux["lambda"] = lambda;

    // theta >= 1/n^(1-eps) with eps = ln ln n / ln n is theta >= ln n / n
    const double lnn = std::log(n);
    const double edge = lnn > 1.0 ? lnn : 1.0;
    auto near = [](double a, double b) { return a / b < 2.0 && b / a < 2.0; };
    std::string regime;
    if (lambda >= edge) {
        regime = "large-prob";
    } else if (lambda * edge < 1.0) {
        regime = "small-prob";
    } else {
        regime = "middle";
    }
    if (regime != "large-prob" && near(lambda, edge)) regime = "large-prob|middle";
    if (regime == "large-prob" && near(lambda, edge)) regime = "large-prob|middle";
    if (near(lambda * edge, 1.0)) regime = "middle|small-prob";
    r.regime = regime;

    // Leading terms
    if (regime.rfind("large-prob", 0) == 0) {
        r.asymptotic_LB = nH - lk.mid();
        r.asymptotic_UB = nH - shrink * lk.mid();
    } else if (regime == "small-prob") {
        r.asymptotic_LB = n * lambda / 2.0 * std::log2(kE * k);
        r.asymptotic_UB = n * lambda / 2.0 * std::log2(2.0 * kE * k);
    } else {
        const double g = (1.0 - std::exp(-lambda)) / lambda;
        r.asymptotic_LB =
            (1.0 - g) * n * std::log2(k) + (std::exp(lambda) - lambda - 1.0) * kLog2e / (lambda * std::exp(lambda)) * n;
        double best = std::numeric_limits<double>::infinity(), ba = opt.alpha_min;
        const auto steps = static_cast<long>(std::floor((opt.alpha_max - opt.alpha_min) / opt.alpha_step + 1e-9));
        for (long i = 0; i <= steps; ++i) {
            const double a = opt.alpha_min + static_cast<double>(i) * opt.alpha_step;
            const double c = uniform_asym_ub_coeff(lambda, a);
            if (c < best) {
                best = c;
                ba = a;
            }
        }
        r.asymptotic_UB = (1.0 - g) * n * std::log2(std::min(n, k)) + (1.0 - std::exp(-lambda)) * kLog2e / lambda * n +
                          best * n;
        r.aux["alpha_asymptotic"] = ba;
    }
    return r;
}

}  // namespace

ClosedFormResult uniform_bounds_k(std::int64_t k, double n, const ClosedFormOptions& opt) {
    if (!(n >= 1)) throw DomainError("uniform: need n >= 1");
    return uniform_common(Distribution::uniform_k(k), static_cast<double>(k), n, opt);
}

ClosedFormResult uniform_bounds_rate(double lambda, double n, const ClosedFormOptions& opt) {
    const Distribution d = Distribution::uniform_rate(lambda, n);
    return uniform_common(d, d.support_size(), n, opt);
}

// ---------------------------------------------------------------------------
// Slowly decaying over the integers

ClosedFormResult slow_integer_bounds(double gamma, double n, BoundMode mode, const ClosedFormOptions& opt) {
    const Distribution d = Distribution::slow_integer(gamma);
    ClosedFormResult r = base_result(d, n, mode);
    const double a = d.normalizer().mid();
    const double ln2 = std::log(2.0);
    const double l3 = std::log2(3.0), ln_ = std::log2(n);
    double per;
    if (gamma < 1.0) {
        per = a * ln2 / (1.0 - gamma) * std::pow(std::log2(n / 2.0), 1.0 - gamma) +
              a * (1.0 + gamma) / (gamma * gamma) *
                  ((1.0 + gamma * std::log(l3)) / std::pow(l3, gamma) -
                   (1.0 + gamma * std::log(ln_)) / std::pow(ln_, gamma));
        r.regime = "gamma<1";
    } else if (gamma == 1.0) {
        per = a * ln2 * std::log(ln_) + 2.0 * a * ((1.0 + std::log(l3)) / l3 - (1.0 + std::log(ln_)) / ln_);
        r.regime = "gamma=1";
    } else {
        const double gap = a * ln2 / ((gamma - 1.0) * std::pow(ln_, gamma - 1.0));
        per = r.nHX.mid() / n - gap;
        r.aux["per_symbol_gap"] = gap;
        r.regime = "gamma>1";
    }
    r.aux["alpha"] = a;
    r.asymptotic_LB = r.asymptotic_UB = per * n;
    if (mode == BoundMode::asymptotic) {
        use_asymptotic(r);
        return r;
    }
    const ParamSearchSpec s = family_search(n, 1.7, opt);
    const HeadTable t(d, n);
    attach(r, optimize_lower(t, s), optimize_upper(t, s));
    return r;
}

// ---------------------------------------------------------------------------
// Zipf

ClosedFormResult zipf_bounds(double gamma, double n, BoundMode mode, const ClosedFormOptions& opt) {
    const Distribution d = Distribution::zipf(gamma);
    ClosedFormResult r = base_result(d, n, mode);
    // theta_j = j^-(1+gamma) / zeta(1+gamma); the normalizer is the 1/zeta factor
    const double zeta = 1.0 / d.normalizer().mid();
    const double scale = 1.0 / ((1.0 + gamma) * std::pow(zeta, 1.0 / (1.0 + gamma)));
    const double cl = (1.0 + 1.0 / gamma - 1.0 / (3.0 * (1.0 + 2.0 * gamma))) * scale;
    const double cu = (1.0 - 1.0 / kE + 1.0 / gamma - 1.0 / (2.0 * (1.0 + 2.0 * gamma))) * scale;
    const double order = std::pow(n, 1.0 / (1.0 + gamma)) * std::log2(n);
    r.aux["coef_LB"] = cl;
    r.aux["coef_UB"] = cu;
    r.aux["zeta"] = zeta;
    r.asymptotic_LB = r.nHX.mid() - cl * order;
    r.asymptotic_UB = r.nHX.mid() - cu * order;
    if (mode == BoundMode::asymptotic) {
        use_asymptotic(r);
        return r;
    }
    const HeadTable t(d, n);
    ParamSearchSpec s = family_search(n, 1.875, opt);
    LowerOptimum lo = optimize_lower(t, s);
    // Alternative separation thresholds tuned for this family
    ParamSearchSpec s2 = s;
    s2.theta_minus = std::exp(-1.97);
    s2.theta_plus = std::exp(0.98);
    try {
        const LowerOptimum lo2 = optimize_lower(t, s2);
        if (lo2.best.LB > lo.best.LB) lo = lo2;
    } catch (const InfeasibleError&) {
    }
    attach(r, lo, optimize_upper(t, s));
    return r;
}

// ---------------------------------------------------------------------------
// Geometric

double geometric_bg_max(double p) {
    const double s = 1.0 / std::sqrt(1.0 - p);
    return (2.0 + s) / (s - 1.0);
}

double geometric_CL1(double p) {
    return std::log2(p) / std::log2(1.0 - p) + (5.0 + 2.0 * p - 2.5 * p * p) / (3.0 * p * (2.0 - p));
}

double geometric_CL2(double p) {
    const double q = 1.0 - p, lq = std::log2(1.0 / q), sq = std::sqrt(q);
    double v = (5.0 + 5.0 * p - 4.0 * p * p) / (3.0 * p * (2.0 - p)) * std::log2(1.0 / p);
    v += q * q / (p * p) * (1.0 / q - 2.0 * (p * p - 2.0 * p + 0.5) / (3.0 * (2.0 - p) * (2.0 - p))) * lq;
    v += lf(std::floor(2.0 * std::log2(3.0 / sq) / lq));
    const double bg = geometric_bg_max(p);
    for (double b = 2; b <= bg; ++b) v += lf(std::max(0.0, std::floor(2.0 * std::log2((b + 2.0) / ((b - 1.0) * sq)) / lq)));
    const double N = std::floor(6.9 * kLog2e / lq + 1.0);
    const double Kp = std::min(N, std::floor(1.4 * kLog2e / lq + 1.0));
    double bc = 0;
    for (double k = 0; k <= Kp; ++k) bc = std::max(bc, log2_binomial(N, k).mid());
    return v + bc;
}

namespace {

struct GeoLower {
    double LB = -std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    double eps = 0, eps0 = 0, V1 = 0, V2 = 0, V3 = 0, S1 = 0, S4 = 0;
};
struct GeoUpper {
    double UB = std::numeric_limits<double>::infinity();
    double gap = -std::numeric_limits<double>::infinity();
    double eps0 = 0, eps1 = 0, eps2 = 0, U = 0, R0 = 0, R1 = 0;
    double R01 = NAN;  // set when the small probabilities share one point mass
};

class GeoRecipe {
  public:
    GeoRecipe(double p, double n) : p_(p), q_(1.0 - p), n_(n), lq_(std::log2(1.0 / (1.0 - p))), H_(h2(p) / p) {}

    double theta(double j) const { return p_ * std::pow(q_, j - 1.0); }
    // smallest index whose probability is <= n^-(1+eb)
    double jidx(double eb) const {
        return std::max(1.0, std::ceil(std::log2(p_ * std::pow(n_, 1.0 + eb) / q_) / lq_));
    }

    GeoLower lower(double eps, double eps0, double tm, double tp) const {
        const double n = n_, p = p_, q = q_, lq = lq_;
        GeoLower g;
        g.eps = eps;
        g.eps0 = eps0;
        const double j0 = jidx(eps0), j1 = jidx(-eps);
        const double phi0 = std::pow(q, j0 - 1.0), phi01 = std::pow(q, j1 - 1.0);
        g.V1 = phi0 > 0 ? n * phi0 * std::log2(phi0 / phi01) - n * phi0 * H_ : 0.0;
        long double v2 = 0;
        for (double j = j1; j < j0; ++j) {
            const double th = theta(j);
            v2 += -std::expm1(-n * (th + th * th)) * std::log2(phi01 / th);
        }
        g.V2 = static_cast<double>(v2);
        g.V3 = n * n / 2.0 *
               (p * phi0 * phi0 / (2.0 - p) * std::log2(phi01 / (p * phi0)) +
                q * q / ((2.0 - p) * (2.0 - p)) * phi0 * phi0 * lq);
        const double c = 1.0 - 1.0 / (3.0 * std::pow(n, eps0)) - 2.0 / n;
        const double K = j1 - 1.0;
        const double en = std::min(1.0, n * K * std::exp(-0.1 * std::pow(n, eps)));
        const double root = std::pow(std::sqrt(n), 1.0 - eps);
        const double Bxi = std::floor(root), Axi = std::floor(root / std::sqrt(2.0));
        const double s = 1.0 / std::sqrt(q);
        const double cap = std::sqrt(p * std::pow(n, 1.0 - eps) / q);
        const double tail = en * lf(K) + h2(std::min(en, 0.5));
        double sm = K > 0 ? lf(std::floor(2.0 * std::log2(3.0 * s) / lq)) : 0.0;
        const double bg = std::min({(2.0 + s) / (s - 1.0), Bxi, cap - 2.0});
        for (double b = 2; b <= bg; ++b) sm += lf(std::max(0.0, std::floor(2.0 * std::log2((b + 2.0) / (b - 1.0) * s) / lq)));
        const double s1b2 = (1.0 - en) * sm + tail;
        const double bg1 = std::min({Axi, cap - 1.0, 1.0 / (s - 1.0)});
        sm = 0;
        for (double b = 1; b <= bg1; ++b) sm += lf(std::max(0.0, std::floor(2.0 * std::log2((b + 1.0) / b * s) / lq)));
        const double s1b1 = (1.0 - en) * (sm + K * std::log2(3.0)) + tail;
        g.S1 = std::min({lf(K), s1b1, s1b2});
        const double f = separation_exponent(tm, tp);
        const double kt = std::ceil(std::log2(p * n * n * n / q) / lq);
        const double epn =
            std::clamp(n * kt * std::exp(-f * std::pow(n, eps)) + std::log(tm) / (2.0 * (tm - 1.0) * std::pow(n, 1.0 + eps)),
                       0.0, 1.0);
        const double N = std::floor(std::log2(tp / tm) / lq + 1.0);
        const double Kp = std::min(N, std::floor(std::log2(tp) / lq + 1.0));
        double bc = 0;
        for (double k = 0; k <= Kp; ++k) bc = std::max(bc, log2_binomial(N, k).hi);
        g.S4 = std::min(n * binary_entropy(phi01), (1.0 - epn) * bc + epn * n + h2(std::min(epn, 0.5)));
        // the gap below n H(X), with slack relative to its own terms
        const double gap = -g.V1 + g.V2 - c * g.V3 + g.S1 + g.S4;
        const double mag = std::fabs(g.V1) + g.V2 + std::fabs(c * g.V3) + g.S1 + g.S4;
        g.gap = std::isfinite(gap) ? gap + 1e-12 * (mag + 1.0) : std::numeric_limits<double>::infinity();
        g.LB = n * H_ - g.gap;
        return g;
    }

    GeoUpper upper(double e0, double e1, double e2, bool merged = false) const {
        const double n = n_, p = p_, q = q_;
        GeoUpper g;
        g.eps0 = e0;
        g.eps1 = e1;
        g.eps2 = e2;
        const double j0 = jidx(e0), j1 = jidx(e1);
        const double phi0 = std::pow(q, j0 - 1.0), phi01 = std::pow(q, j1 - 1.0), phi1 = phi01 - phi0;
        // R0 from sum theta^2 = phi^2 p / (2 - p) over a geometric tail
        auto r0_form = [&](double phi) {
            return phi > 0 ? p / (2.0 * (2.0 - p)) * n * n * phi * phi * std::log2(2.0 * kE * (2.0 - p) / (p * phi)) : 0.0;
        };
        double packing_gap;
        if (merged) {
            packing_gap = n * phi01 * H_;
            g.R0 = g.R1 = NAN;
            g.R01 = 0;
            const double nphi = n * phi01;
            if (nphi > 0) {
                // L01 over the whole tail, the remainder bounded by n times its mass
                long double L = 0;
                double j = j1;
                for (; j < j1 + 2e6; ++j) {
                    const double th = theta(j);
                    L += -std::expm1(n * std::log1p(-th));
                    if (n * th < 1e-18) break;
                }
                if (!(j < j1 + 2e6)) return g;
                const double Llo = static_cast<double>(L), Lhi = std::min(nphi, Llo + n * std::pow(q, j));
                // Rb is concave in L: take its largest value over [Llo, Lhi]
                const double ls = std::clamp(nphi / (n + 1.0), Llo, Lhi);
                g.R01 = (nphi - ls) * std::log2(n) + nphi * h2(ls / nphi);
                if (e1 >= 0.0) g.R01 = std::min(g.R01, r0_form(phi01));
            }
        } else {
            packing_gap = n * phi01 * H_ - n * phi01 * h2(phi0 / phi01);
            g.R0 = r0_form(phi0);
            long double L1 = 0;
            for (double j = j1; j < j0; ++j) L1 += -std::expm1(n * std::log1p(-theta(j)));
            const double k1 = j0 - j1;
            g.R1 = 0;
            if (k1 > 0 && phi1 > 0) {
                const double L = static_cast<double>(L1);
                g.R1 = (n * phi1 - L) * std::log2(std::min(k1, n)) + n * phi1 * h2(L / (n * phi1));
            }
        }
        // first occurrences in the large-probability bins
        const double fl = std::floor(std::pow(n, (e2 - e1) / 2.0));
        const double root = std::pow(std::sqrt(n), 1.0 + e2);
        const double B = std::floor(root) - fl + 2.0, A = std::floor(root / std::sqrt(2.0)) - fl + 2.0;
        const double N = std::pow(n, 1.0 + e2);
        auto eta = [&](double b) {
            if (b <= 0) return 0.0;
            if (b == 1) return std::pow(n, -(1.0 + e0));
            if (b == 2) return std::pow(n, -(1.0 + e1));
            if (b >= B + 1) return 1.0;
            const double bp = b + fl - 2.0;
            return bp * bp / N;
        };
        double U = 0, corr = 0;
        double cur_b = -1, kb = 0, Lb = 0;
        auto flush = [&] {
            if (kb == 0) return;
            if (cur_b <= A) {
                const double t1 = Lb > 0 ? Lb * std::log2(Lb / kE) : 0.0;
                const double t2 = (1.0 - std::min(1.0, kb * std::exp(-n * eta(cur_b)))) * lf(kb);
                U += std::max({0.0, t1, t2});
            }
            if (kb > 1) {
                const double bp = cur_b + fl - 2.0;
                corr += (2.0 + 1.0 / bp) * (2.0 + 1.0 / bp) * kLog2e * kb / std::pow(n, e2);
            }
        };
        for (double j = 1; j < j1; ++j) {
            const double th = theta(j);
            double b = std::min(B, std::max(2.0, std::ceil(std::sqrt(th * N)) - 1.0 - fl + 2.0));
            // the estimate is off by at most a step or two; indices beyond 2^53 cannot move
            for (int it = 0; it < 64 && b > 2 && th <= eta(b); ++it) --b;
            for (int it = 0; it < 64 && b < B && th > eta(b + 1); ++it) ++b;
            if (!(th > eta(b)) || (b < B && th > eta(b + 1))) return g;  // unresolvable grid: infeasible point
            if (b != cur_b) {
                flush();
                cur_b = b;
                kb = 0;
                Lb = 0;
            }
            kb += 1;
            Lb += -std::expm1(n * std::log1p(-th));
        }
        flush();
        g.U = std::max(0.0, U - corr);
        const double R = merged ? g.R01 : g.R0 + g.R1;
        const double gap = packing_gap + g.U - R;
        const double mag = n * phi01 * H_ + g.U + R;
        g.gap = std::isfinite(gap) ? gap - 1e-12 * (mag + 1.0) : -std::numeric_limits<double>::infinity();
        g.UB = n * H_ - g.gap;
        return g;
    }

  private:
    double p_, q_, n_, lq_, H_;
};

}  // namespace

ClosedFormResult geometric_bounds(double p, double n, BoundMode mode, const ClosedFormOptions& opt) {
    const Distribution d = Distribution::geometric(p);
    ClosedFormResult r = base_result(d, n, mode);
    const double q = 1.0 - p, lq = std::log2(1.0 / q);
    r.aux["C_L1"] = geometric_CL1(p);
    r.aux["C_L2"] = geometric_CL2(p);
    r.aux["bg_max"] = geometric_bg_max(p);
    r.aux["k_theta_sum"] = std::floor(6.9 * kLog2e / lq + 1.0);
    r.aux["k_theta_plus"] = std::floor(1.4 * kLog2e / lq + 1.0);
    const double nH = r.nHX.mid();
    const double lnn = std::log(n);
    if (lnn > 1.0 && std::log2(std::log2(n)) > 0) {
        // smallest admissible delta
        const double delta = std::log(20.0) / std::log(lnn);
        const double lln = std::log2(lnn);
        r.aux["delta"] = delta;
        r.asymptotic_LB = nH - (1 + delta) * (1 + delta) * lln * lln / (2.0 * lq) - r.aux["C_L1"] * (1 + delta) * lln -
                          r.aux["C_L2"];
        const double ll = std::log2(std::log2(n)), lll = std::log2(ll);
        const double k2 = 1.0 / (2.0 * (2.0 - p) * p);
        r.asymptotic_UB = nH - (q * h2(p) / (p * p) - k2 * (1.0 + lll / ll)) / ll +
                          k2 * std::log2(2.0 * kE * (2.0 - p) / (q * lq)) / (ll * ll);
    }
    if (mode == BoundMode::asymptotic) {
        use_asymptotic(r);
        return r;
    }

    const GeoRecipe g(p, n);
    const double c0 = lnn > 1.0 ? std::log(lnn) / lnn : 0.1;
    const unsigned jobs = jobs_of(opt);
    // lower: eps along the (ln ln n)/(ln n) curve
    std::vector<GeoLower> lows(160);
    parallel_for(lows.size(), jobs, [&](std::size_t i) {
        const double eps = c0 * static_cast<double>(i + 1) * 0.025;
        GeoLower best;
        for (int k = 0; k <= 80; ++k) {
            const GeoLower v = g.lower(eps, k * 0.025, kDefaultThetaMinus, kDefaultThetaPlus);
            if (v.gap < best.gap) best = v;
        }
        lows[i] = best;
    });
    GeoLower lo;
    for (const auto& v : lows) {
        if (v.gap < lo.gap) lo = v;
    }
    // upper
    // eps1 from 0 to 1; merged packing ignores eps0, so it is scanned once per (eps1, eps2)
    std::vector<GeoUpper> ups(41);
    parallel_for(ups.size(), jobs, [&](std::size_t i) {
        const double e1 = static_cast<double>(i) * 0.025;
        GeoUpper best;
        for (int b = 0; b <= 15; ++b) {
            const double e2 = std::max(e1, 0.0) + b * 0.1;
            for (int a = 1; a <= 40; ++a) {
                const GeoUpper v = g.upper(e1 + a * 0.025, e1, e2);
                if (v.gap > best.gap) best = v;
            }
            const GeoUpper m = g.upper(e1 + 0.025, e1, e2, true);
            if (m.gap > best.gap) best = m;
        }
        ups[i] = best;
    });
    GeoUpper up;
    for (const auto& v : ups) {
        if (v.gap > up.gap) up = v;
    }
    if (!std::isfinite(lo.gap)) throw InfeasibleError("S1", "geometric recipe produced no finite lower bound");
    if (!std::isfinite(up.gap)) throw InfeasibleError("U", "geometric recipe produced no finite upper bound");
    r.LB = std::max(0.0, round_down(r.nHX.lo - lo.gap));
    r.UB = std::min(r.nHX.hi, round_up(r.nHX.hi - std::max(0.0, up.gap)));
    r.aux["eps"] = lo.eps;
    r.aux["eps0"] = lo.eps0;
    r.aux["V1"] = lo.V1;
    r.aux["V2"] = lo.V2;
    r.aux["V3"] = lo.V3;
    r.aux["S1"] = lo.S1;
    r.aux["S4"] = lo.S4;
    r.aux["ub_eps0"] = up.eps0;
    r.aux["eps1"] = up.eps1;
    r.aux["eps2"] = up.eps2;
    r.aux["U"] = up.U;
    if (std::isnan(up.R01)) {
        r.aux["R0"] = up.R0;
        r.aux["R1"] = up.R1;
    } else {
        r.aux["R01"] = up.R01;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Linear

ClosedFormResult linear_bounds(double lambda, double n, BoundMode mode, const ClosedFormOptions& opt) {
    const Distribution d = Distribution::linear(lambda, n);
    ClosedFormResult r = base_result(d, n, mode);
    const double nH = r.nHX.mid();
    const double dl = opt.linear_delta;
    if (lambda >= std::pow(n, 2.0 / 3.0 + dl)) {
        r.regime = "1";
        r.asymptotic_LB = r.asymptotic_UB = nH;
    } else if (lambda >= std::pow(n, dl) / 2.0 && lambda <= std::pow(n, 2.0 / 3.0 - dl)) {
        r.regime = "2";
        r.asymptotic_LB = r.asymptotic_UB = nH - n / lambda * std::log2(n / std::pow(lambda, 1.5));
    } else if (lambda <= 0.5) {
        r.regime = "3";
        const double lo = (1.0 - 2.0 * lambda / 3.0) * 2.0 / 3.0, hi = 2.0 / 3.0;
        r.aux["C_lambda_lo"] = lo;
        r.aux["C_lambda_hi"] = hi;
        const double base = lambda * n * std::log2(n / lambda);
        r.asymptotic_LB = lo * base;
        r.asymptotic_UB = hi * base;
    } else {
        r.regime = "boundary";
    }
    if (mode == BoundMode::asymptotic) {
        use_asymptotic(r);
        return r;
    }
    ParamSearchSpec s = ParamSearchSpec::defaults(n);
    s.jobs = jobs_of(opt);
    const HeadTable t(d, n);
    attach(r, optimize_lower(t, s), optimize_upper(t, s));
    return r;
}

// ---------------------------------------------------------------------------

ClosedFormResult family_bounds(const Distribution& dist, double n, BoundMode mode, const ClosedFormOptions& opt) {
    if (mode == BoundMode::general) {
        ParamSearchSpec s = ParamSearchSpec::defaults(n);
        s.jobs = jobs_of(opt);
        return general_bounds_result(dist, n, s);
    }
    switch (dist.family()) {
        case Family::uniform_k: {
            ClosedFormResult r = uniform_bounds_k(static_cast<std::int64_t>(dist.support_size()), n, opt);
            r.mode = mode;
            if (mode == BoundMode::asymptotic) use_asymptotic(r);
            return r;
        }
        case Family::uniform_rate: {
            if (std::fabs(dist.rate_n() - n) > 1e-9 * n) {
                ClosedFormResult r = uniform_common(dist, dist.support_size(), n, opt);
                r.mode = mode;
                if (mode == BoundMode::asymptotic) use_asymptotic(r);
                return r;
            }
            ClosedFormResult r = uniform_bounds_rate(dist.parameter(), n, opt);
            r.mode = mode;
            if (mode == BoundMode::asymptotic) use_asymptotic(r);
            return r;
        }
        case Family::slow_integer:
            return slow_integer_bounds(dist.parameter(), n, mode, opt);
        case Family::zipf:
            return zipf_bounds(dist.parameter(), n, mode, opt);
        case Family::geometric:
            return geometric_bounds(dist.parameter(), n, mode, opt);
        case Family::linear:
            if (std::fabs(dist.rate_n() - n) <= 1e-9 * n) return linear_bounds(dist.parameter(), n, mode, opt);
            break;
        case Family::explicit_vector:
            break;
    }
    if (mode == BoundMode::asymptotic) {
        throw InfeasibleError("asymptotic", std::string("no asymptotic formula for family ") + dist.name());
    }
    ParamSearchSpec s = ParamSearchSpec::defaults(n);
    s.jobs = jobs_of(opt);
    ClosedFormResult r = general_bounds_result(dist, n, s);
    r.mode = mode;
    return r;
}

}  // namespace pattent
