#include "pattent/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace pattent {
namespace detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kU = std::numeric_limits<double>::epsilon();

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

double range_count(const IndexRange& r) {
    if (r.empty()) return 0.0;
    if (std::isinf(r.last)) return kInf;
    return r.last - r.first + 1.0;
}

int kind_power(SumKind k) {
    switch (k) {
        case SumKind::mass:
        case SumKind::neg_entropy:
            return 1;
        case SumKind::sq:
        case SumKind::sq_neg_entropy:
            return 2;
        case SumKind::cube:
            return 3;
    }
    return 1;
}

bool kind_has_log(SumKind k) { return k == SumKind::neg_entropy || k == SumKind::sq_neg_entropy; }

// The summand of each kind as a function of one probability.
Interval term(SumKind k, const Interval& t) {
    switch (k) {
        case SumKind::mass:
            return t;
        case SumKind::sq:
            return t * t;
        case SumKind::cube:
            return t * t * t;
        case SumKind::neg_entropy:
            return xlog2inv(t);
        case SumKind::sq_neg_entropy:
            return t * xlog2inv(t);
    }
    return t;
}

}  // namespace

class Model {
  public:
    virtual ~Model() = default;
    virtual Family family() const = 0;
    virtual std::string name() const = 0;
    virtual std::string params() const = 0;
    virtual double parameter() const = 0;
    virtual double rate_n() const { return 0.0; }
    virtual bool infinite() const = 0;
    virtual double size() const = 0;
    virtual Interval normalizer() const { return Interval(1.0); }
    virtual Interval pmf(double j) const = 0;
    virtual IndexRange band(double lo, double hi) const = 0;
    virtual double count(const IndexRange& r) const { return range_count(r); }
    virtual Interval sum(SumKind k, const IndexRange& r) const = 0;
    virtual void visit(const IndexRange& r, bool ascending, const Distribution::Visitor& fn) const = 0;
    // Complement trick for bands reaching down to zero probability.
    virtual Interval mass_below(double hi) const { return sum(SumKind::mass, band(0.0, hi)); }
    virtual IidEntropy entropy() const {
        IidEntropy e;
        const Interval h = sum(SumKind::neg_entropy, band(0.0, 1.0));
        if (!std::isfinite(h.hi)) {
            e.infinite = true;
            e.bits = Interval(kInf);
        } else {
            e.bits = h;
        }
        return e;
    }
    virtual std::vector<double> probabilities() const = 0;

    DistributionOptions opts;
};

// Tabulated model: sorted runs of equal probabilities.
class RunsModel final : public Model {
  public:
    struct Run {
        Interval theta;
        double point;
        double mult;
    };

    RunsModel(Family f, std::vector<Run> runs, double param, double n) : fam_(f), runs_(std::move(runs)), param_(param), n_(n) {
        for (const auto& r : runs_) size_ += r.mult;
    }

    Family family() const override { return fam_; }
    std::string name() const override { return fam_ == Family::explicit_vector ? "explicit" : "uniform"; }
    std::string params() const override {
        if (fam_ == Family::uniform_k) return "k=" + fmt_num(param_);
        if (fam_ == Family::uniform_rate) return "lambda=" + fmt_num(param_) + ";n=" + fmt_num(n_);
        return "k=" + fmt_num(size_);
    }
    double parameter() const override { return param_; }
    double rate_n() const override { return n_; }
    bool infinite() const override { return false; }
    double size() const override { return size_; }

    Interval pmf(double j) const override {
        // j is the ascending rank 1..k
        double acc = 0;
        for (const auto& r : runs_) {
            acc += r.mult;
            if (j <= acc) return r.theta;
        }
        throw DomainError("pmf: index outside support");
    }

    IndexRange band(double lo, double hi) const override {
        auto first = std::upper_bound(runs_.begin(), runs_.end(), lo, [](double v, const Run& r) { return v < r.point; });
        auto last = std::upper_bound(runs_.begin(), runs_.end(), hi, [](double v, const Run& r) { return v < r.point; });
        return {static_cast<double>(first - runs_.begin()), static_cast<double>(last - runs_.begin()) - 1.0};
    }

    double count(const IndexRange& r) const override {
        if (r.empty()) return 0.0;
        double c = 0;
        for (auto i = static_cast<std::size_t>(r.first); i <= static_cast<std::size_t>(r.last); ++i) c += runs_[i].mult;
        return c;
    }

    Interval sum(SumKind k, const IndexRange& r) const override {
        if (r.empty()) return Interval(0.0);
        IntervalSum acc;
        for (auto i = static_cast<std::size_t>(r.first); i <= static_cast<std::size_t>(r.last); ++i) {
            acc.add(term(k, runs_[i].theta), runs_[i].mult);
        }
        return acc.value();
    }

    void visit(const IndexRange& r, bool ascending, const Distribution::Visitor& fn) const override {
        if (r.empty()) return;
        const auto a = static_cast<std::ptrdiff_t>(r.first), b = static_cast<std::ptrdiff_t>(r.last);
        if (ascending) {
            for (auto i = a; i <= b; ++i) fn(runs_[i].theta, runs_[i].mult);
        } else {
            for (auto i = b; i >= a; --i) fn(runs_[i].theta, runs_[i].mult);
        }
    }

    std::vector<double> probabilities() const override {
        std::vector<double> out;
        for (const auto& r : runs_) out.insert(out.end(), static_cast<std::size_t>(r.mult), r.point);
        return out;
    }

    IidEntropy entropy() const override {
        if (fam_ != Family::explicit_vector) {
            // log2 k for the uniform families
            return {false, log2(Interval(size_))};
        }
        return Model::entropy();
    }

  private:
    Family fam_;
    std::vector<Run> runs_;
    double param_;
    double n_;
    double size_ = 0;
};

// Families indexed by j with probabilities decreasing in j.
class DecreasingModel : public Model {
  public:
    bool infinite() const override { return true; }
    double size() const override { return kInf; }

    virtual double jmin() const = 0;
    virtual double theta_point(double j) const = 0;
    // Real-valued extension used for integrals; convex and decreasing for large x.
    virtual Interval integral(SumKind k, double x0, double x1) const = 0;
    // Estimate for the smallest j with theta_j <= t, refined by first_le.
    virtual double first_le_estimate(double t) const = 0;

    double first_le(double t) const {
        if (t <= 0) return kInf;
        double j = std::max(jmin(), std::ceil(first_le_estimate(t)));
        if (!std::isfinite(j)) return kInf;
        if (j > 1e15) return j;  // beyond exact integer stepping
        while (j > jmin() && theta_point(j - 1) <= t) j -= 1;
        while (theta_point(j) > t) j += 1;
        return j;
    }

    IndexRange band(double lo, double hi) const override {
        IndexRange r;
        r.first = first_le(hi);
        r.last = lo <= 0 ? kInf : first_le(lo) - 1.0;
        return r;
    }

    Interval sum(SumKind k, const IndexRange& r) const override {
        if (r.empty()) return Interval(0.0);
        const double n = range_count(r);
        IntervalSum acc;
        if (n <= static_cast<double>(opts.exact_range_terms)) {
            for (double j = r.first; j <= r.last; j += 1) acc.add(term(k, pmf(j)));
            return acc.value();
        }
        const double head_end = r.first + static_cast<double>(opts.tail_head_terms);
        for (double j = r.first; j < head_end; j += 1) acc.add(term(k, pmf(j)));
        const double a = head_end;
        Interval tail;
        if (std::isinf(r.last)) {
            const Interval lower = integral(k, a, kInf);
            const Interval upper = integral(k, a - 0.5, kInf);
            tail = {round_down(lower.lo + 0.5 * term(k, pmf(a)).lo), upper.hi};
        } else {
            const double b = r.last;
            const Interval lower = integral(k, a, b + 1.0);
            const Interval upper = integral(k, a - 0.5, b + 0.5);
            tail = {round_down(lower.lo + 0.5 * (term(k, pmf(a)).lo - term(k, pmf(b + 1.0)).hi)), upper.hi};
        }
        tail.lo = std::max(0.0, tail.lo);
        return acc.value() + tail;
    }

    Interval mass_below(double hi) const override {
        const IndexRange tail = band(0.0, hi);
        Interval direct = sum(SumKind::mass, tail);
        if (tail.first <= jmin()) return intersect(direct, Interval(0.0, 1.0));
        const IndexRange head{jmin(), tail.first - 1.0};
        const Interval above = sum(SumKind::mass, head);
        const Interval comp = Interval(1.0) - above;
        const Interval both = intersect(direct, comp);
        if (!both.valid()) return comp;
        return intersect(both, Interval(0.0, 1.0));
    }

    void visit(const IndexRange& r, bool ascending, const Distribution::Visitor& fn) const override {
        if (r.empty()) return;
        if (std::isinf(r.last)) throw TooLargeError("visit: infinite band", kInf);
        if (ascending) {
            for (double j = r.last; j >= r.first; j -= 1) fn(pmf(j), 1.0);
        } else {
            for (double j = r.first; j <= r.last; j += 1) fn(pmf(j), 1.0);
        }
    }

    std::vector<double> probabilities() const override { throw DomainError("probabilities: infinite support"); }
};

class GeometricModel final : public DecreasingModel {
  public:
    explicit GeometricModel(double p) : p_(p), lnq_(std::log1p(-p)), lnp_(std::log(p)) {}
    Family family() const override { return Family::geometric; }
    std::string name() const override { return "geom"; }
    std::string params() const override { return "p=" + fmt_num(p_); }
    double parameter() const override { return p_; }
    double jmin() const override { return 1.0; }

    double theta_point(double j) const override { return pmf(j).mid(); }
    Interval pmf(double j) const override {
        // short heads by repeated multiplication, exact whenever every product is
        if (j == 1.0) return Interval(p_);
        const double q = 1.0 - p_;
        if (j <= 64.0 && 1.0 - q == p_) {
            double v = p_;
            bool exact = true;
            for (double i = 1.0; i < j; i += 1.0) {
                const double w = v * q;
                exact = exact && std::fma(v, q, -w) == 0.0;
                v = w;
            }
            return exact ? Interval(v) : Interval(v).widened_rel(j * 2.0 * kU);
        }
        const double x = lnp_ + (j - 1.0) * lnq_;
        const double v = std::exp(x);
        return Interval(v).widened_rel((std::fabs(x) + 2.0) * 4.0 * kU);
    }
    double first_le_estimate(double t) const override {
        if (t >= p_) return 1.0;
        return 1.0 + std::log(t / p_) / lnq_;
    }
    Interval integral(SumKind, double, double) const override { return Interval(0.0); }

    Interval sum(SumKind k, const IndexRange& r) const override {
        if (r.empty()) return Interval(0.0);
        const double n = range_count(r);
        if (n <= static_cast<double>(opts.exact_range_terms)) {
            IntervalSum acc;
            for (double j = r.first; j <= r.last; j += 1) acc.add(term(k, pmf(j)));
            return acc.value();
        }
        // closed forms: sum_{j=a}^{b} (p q^{j-1})^m [log2(1/p) + (j-1) log2(1/q)]
        const int m = kind_power(k);
        const double lr = m * lnq_;                  // log r, r = q^m
        const double i0 = r.first - 1.0;
        const double head = std::exp(m * lnp_ + i0 * lr);  // p^m r^{i0}
        const double D = -std::expm1(lr);            // 1 - r
        const double rr = std::exp(lr);
        const double rN = std::isinf(n) ? 0.0 : std::exp(n * lr);
        const double one_minus_rN = std::isinf(n) ? 1.0 : -std::expm1(n * lr);
        const double G = one_minus_rN / D;
        double value = head * G;
        if (kind_has_log(k)) {
            const double lq2 = -lnq_ * kLog2e;
            const double lp2 = -lnp_ * kLog2e;
            double weighted = i0 * one_minus_rN / D + rr * one_minus_rN / (D * D);
            if (!std::isinf(n)) weighted -= n * rN / D;
            value = head * (lp2 * G + lq2 * weighted);
        }
        const double cancel = std::isinf(n) ? 0.0 : std::min(n * D, 1e6) * 1e-3;
        const double rel = 1e-12 * (2.0 + std::fabs(i0 * lr) + cancel);
        Interval out = Interval(value).widened_rel(rel);
        out.lo = std::max(0.0, out.lo);
        return out;
    }

    IidEntropy entropy() const override {
        return {false, Interval(binary_entropy(p_) / p_).widened_rel(16 * kU)};
    }

  private:
    double p_, lnq_, lnp_;
};

class ZipfModel final : public DecreasingModel {
  public:
    ZipfModel(double gamma, const DistributionOptions& o) : gamma_(gamma), s_(1.0 + gamma) {
        opts = o;
        // zeta(s): exact head plus convex tail bracket
        const auto M = static_cast<double>(o.normalizer_head_terms);
        long double acc = 0;
        for (double j = M; j >= 1; j -= 1) acc += std::exp(-s_ * std::log(static_cast<long double>(j)));
        const double err = static_cast<double>((M + 2) * std::numeric_limits<long double>::epsilon() * acc);
        const double a = M + 1.0;
        const double f_a = std::pow(a, -s_);
        const double tail_lo = std::pow(a, 1.0 - s_) / gamma_ + 0.5 * f_a;
        const double tail_hi = std::pow(a - 0.5, 1.0 - s_) / gamma_;
        zeta_ = Interval(static_cast<double>(acc) - err + tail_lo, static_cast<double>(acc) + err + tail_hi).widened(8);
        c_ = Interval(1.0) / zeta_;
        cmid_ = c_.mid();
    }
    Family family() const override { return Family::zipf; }
    std::string name() const override { return "zipf"; }
    std::string params() const override { return "gamma=" + fmt_num(gamma_); }
    double parameter() const override { return gamma_; }
    Interval normalizer() const override { return c_; }
    Interval zeta() const { return zeta_; }
    double jmin() const override { return 1.0; }

    double theta_point(double j) const override { return cmid_ * std::exp(-s_ * std::log(j)); }
    Interval pmf(double j) const override { return c_ * Interval(std::exp(-s_ * std::log(j))).widened(3); }
    double first_le_estimate(double t) const override { return std::pow(cmid_ / t, 1.0 / s_); }

    Interval integral(SumKind k, double x0, double x1) const override {
        const int m = kind_power(k);
        const double t = m * s_;
        auto xpow = [&](double x) { return std::isinf(x) ? Interval(0.0) : Interval(std::pow(x, 1.0 - t)).widened(3); };
        auto F = [&](double x) {
            if (std::isinf(x)) return Interval(0.0);
            const Interval lx = Interval(std::log(x)).widened(2);
            return xpow(x) * (lx / Interval(t - 1.0) + Interval(1.0 / ((t - 1.0) * (t - 1.0))).widened(2));
        };
        const Interval P = (xpow(x0) - xpow(x1)) / Interval(t - 1.0);
        Interval cm = pow(c_, m);
        if (!kind_has_log(k)) return cm * P;
        const Interval Q = F(x0) - F(x1);
        const Interval l1c = -log2(c_);
        return cm * (l1c * P + Interval(s_ * kLog2e).widened(2) * Q);
    }

  private:
    double gamma_, s_;
    Interval zeta_, c_;
    double cmid_;
};

class SlowIntegerModel final : public DecreasingModel {
  public:
    SlowIntegerModel(double gamma, const DistributionOptions& o) : gamma_(gamma), c_(1.0 + gamma) {
        opts = o;
        const auto M = static_cast<double>(o.normalizer_head_terms);
        long double acc = 0;
        for (double j = M; j >= 2; j -= 1) {
            const long double lj = std::log2(static_cast<long double>(j));
            acc += 1.0L / (static_cast<long double>(j) * std::pow(lj, static_cast<long double>(c_)));
        }
        const double err = static_cast<double>((M + 2) * 4 * std::numeric_limits<long double>::epsilon() * acc);
        const double a = M + 1.0;
        auto tail_int = [&](double x) { return kLn2 * std::pow(std::log2(x), -gamma_) / gamma_; };
        const double f_a = 1.0 / (a * std::pow(std::log2(a), c_));
        const double lo = static_cast<double>(acc) - err + tail_int(a) * (1 - 4 * kU) + 0.5 * f_a * (1 - 4 * kU);
        const double hi = static_cast<double>(acc) + err + tail_int(a - 0.5) * (1 + 4 * kU);
        inv_alpha_ = Interval(lo, hi).widened(8);
        alpha_ = Interval(1.0) / inv_alpha_;
        amid_ = alpha_.mid();
    }
    Family family() const override { return Family::slow_integer; }
    std::string name() const override { return "slowint"; }
    std::string params() const override { return "gamma=" + fmt_num(gamma_); }
    double parameter() const override { return gamma_; }
    Interval normalizer() const override { return alpha_; }
    double jmin() const override { return 2.0; }

    double theta_point(double j) const override { return amid_ / (j * std::pow(std::log2(j), c_)); }
    Interval pmf(double j) const override {
        const double d = j * std::pow(std::log2(j), c_);
        return alpha_ / Interval(d).widened(4);
    }
    double first_le_estimate(double t) const override {
        // beta fixed point: j = alpha / (t (log2 j)^c)
        const double target = amid_ / t;
        if (target <= 2.0) return 2.0;
        double j = std::max(2.0, target);
        for (int it = 0; it < 200; ++it) {
            const double next = std::max(2.0, target / std::pow(std::log2(std::max(j, 2.0)), c_));
            if (std::fabs(next - j) <= 1e-10 * j) {
                j = next;
                break;
            }
            j = next;
        }
        return j;
    }

    IidEntropy entropy() const override {
        if (gamma_ <= 1.0) return {true, Interval(kInf)};
        return Model::entropy();
    }

    Interval integral(SumKind k, double x0, double x1) const override {
        const double L0 = std::log2(x0);
        const double L1 = std::isinf(x1) ? kInf : std::log2(x1);
        auto upow = [](double u, double e) { return std::isinf(u) ? Interval(e < 0 ? 0.0 : kInf) : Interval(std::pow(u, e)).widened(3); };
        const Interval ln2(round_down(kLn2), round_up(kLn2));
        if (k == SumKind::mass || k == SumKind::neg_entropy) {
            const Interval g(gamma_);
            const Interval mass = alpha_ * ln2 * (upow(L0, -gamma_) - upow(L1, -gamma_)) / g;
            if (k == SumKind::mass) return mass;
            // int u^{-gamma} du over [L0, L1]
            Interval J1;
            if (std::fabs(gamma_ - 1.0) < 1e-12) {
                J1 = std::isinf(L1) ? Interval(kInf) : (log(Interval(L1)) - log(Interval(L0)));
            } else if (gamma_ < 1.0) {
                J1 = std::isinf(L1) ? Interval(kInf) : (upow(L1, 1 - gamma_) - upow(L0, 1 - gamma_)) / Interval(1 - gamma_);
            } else {
                J1 = (upow(L0, 1 - gamma_) - upow(L1, 1 - gamma_)) / Interval(gamma_ - 1);
            }
            auto G = [&](double u) {
                if (std::isinf(u)) return Interval(0.0);
                return upow(u, -gamma_) * (log(Interval(u)) / g + Interval(1.0 / (gamma_ * gamma_)).widened(2));
            };
            const Interval J2 = G(L0) - G(L1);
            if (!std::isfinite(J1.hi)) return Interval(mass.lo, kInf);
            return -log2(alpha_) * mass + alpha_ * ln2 * J1 + alpha_ * Interval(c_) * J2;
        }
        return block_integral(kind_power(k), kind_has_log(k), x0, x1);
    }

  private:
    // alpha^m * int x^{-m} L^{-mc} [log2(1/alpha) + L + c log2 L]^{with_log} dx over
    // geometric blocks, each bracketed by its endpoint values.
    Interval block_integral(int m, bool with_log, double x0, double x1) const {
        const double mc = m * c_;
        const Interval A = -log2(alpha_);
        long double lo = 0, hi = 0;
        double x = x0;
        int blocks = 0;
        const double xmax = x0 * 1e16;
        while (x < x1 && x < xmax && blocks < 400000) {
            double r = 1.0 + 2e-4 * std::max(1.0, std::sqrt(x / x0));
            r = std::min(r, 2.0);
            const double xn = std::min(x * r, x1);
            const double P = (std::pow(x, 1.0 - m) - std::pow(xn, 1.0 - m)) / (m - 1.0);
            const double Lx = std::log2(x), Ln = std::log2(xn);
            double h_lo = std::pow(Ln, -mc), h_hi = std::pow(Lx, -mc);
            if (with_log) {
                h_lo *= std::max(0.0, A.lo + Lx + c_ * std::log2(Lx));
                h_hi *= A.hi + Ln + c_ * std::log2(Ln);
            }
            lo += P * h_lo;
            hi += P * h_hi;
            x = xn;
            ++blocks;
        }
        if (x < x1) {
            // crude bound beyond xmax with L frozen at x and log2 L <= L
            const double Lx = std::log2(x);
            const double xm = std::pow(x, 1.0 - m);
            double t = std::pow(Lx, -mc) * xm / (m - 1.0);
            if (with_log) {
                const double F = xm * (std::log(x) / (m - 1.0) + 1.0 / ((m - 1.0) * (m - 1.0)));
                t = std::pow(Lx, -mc) * (A.hi * xm / (m - 1.0) + (1.0 + c_) * kLog2e * F);
            }
            hi += t;
        }
        const double rel = 1e-12 * (1.0 + blocks * 1e-3);
        const Interval core = Interval(static_cast<double>(lo), static_cast<double>(hi)).widened_rel(rel);
        return pow(alpha_, m) * Interval(std::max(0.0, core.lo), core.hi);
    }

    double gamma_, c_;
    Interval inv_alpha_, alpha_;
    double amid_;
};

// theta_i = 2 (i - 0.5) lambda^2 / n^2, i = 1..k, increasing in i.
class LinearModel final : public Model {
  public:
    LinearModel(double lambda, double n, double k, const DistributionOptions& o) : lambda_(lambda), n_(n), k_(k) {
        opts = o;
        ct_ = 2.0 * lambda * lambda / (n * n);
    }
    Family family() const override { return Family::linear; }
    std::string name() const override { return "linear"; }
    std::string params() const override { return "lambda=" + fmt_num(lambda_) + ";n=" + fmt_num(n_); }
    double parameter() const override { return lambda_; }
    double rate_n() const override { return n_; }
    bool infinite() const override { return false; }
    double size() const override { return k_; }

    double theta_point(double i) const { return ct_ * (i - 0.5); }
    Interval pmf(double i) const override {
        if (i < 1 || i > k_) throw DomainError("pmf: index outside support");
        return Interval(theta_point(i)).widened(2);
    }

    // largest i in [0, k] with theta_i <= t
    double last_le(double t) const {
        if (t <= 0) return 0.0;
        double i = std::floor(t / ct_ + 0.5);
        i = std::clamp(i, 0.0, k_);
        while (i < k_ && theta_point(i + 1) <= t) i += 1;
        while (i > 0 && theta_point(i) > t) i -= 1;
        return i;
    }

    IndexRange band(double lo, double hi) const override { return {last_le(lo) + 1.0, last_le(hi)}; }

    Interval sum(SumKind k, const IndexRange& r) const override {
        if (r.empty()) return Interval(0.0);
        const double n = range_count(r);
        if (n <= static_cast<double>(opts.exact_range_terms)) {
            IntervalSum acc;
            for (double i = r.first; i <= r.last; i += 1) acc.add(term(k, pmf(i)));
            return acc.value();
        }
        const double a = r.first, b = r.last;
        const int m = kind_power(k);
        if (!kind_has_log(k)) {
            // exact midpoint identities for (i - 1/2)^m, m <= 3
            const long double ua = a - 1.0L, ub = b;  // integral limits in u = i - 1/2 shifted by 1/2
            auto I = [&](int p) { return (std::pow(ub, p + 1) - std::pow(ua, p + 1)) / (p + 1); };
            long double s = I(m);
            if (m == 2) s -= static_cast<long double>(n) / 12.0L;
            if (m == 3) s -= I(1) / 4.0L;
            const double v = static_cast<double>(s * std::pow(static_cast<long double>(ct_), m));
            return Interval(v).widened_rel(1e-14);
        }
        // theta log(1/theta) is concave; theta^2 log(1/theta) is convex below e^{-3/2}.
        // Midpoint and trapezoid rules then bracket the sum from opposite sides.
        if (m == 2 && theta_point(b + 0.5) > std::exp(-1.5)) {
            IntervalSum acc;
            for (double i = r.first; i <= r.last; i += 1) acc.add(term(k, pmf(i)));
            return acc.value();
        }
        auto Phi = [&](double y) {
            if (y <= 0) return 0.0L;
            const long double yl = y;
            return std::pow(yl, m + 1) / (m + 1) * (-std::log2(yl) + static_cast<long double>(kLog2e) / (m + 1));
        };
        auto integral = [&](double x0, double x1) {
            return static_cast<double>((Phi(theta_point(x1)) - Phi(theta_point(x0))) / ct_);
        };
        const double mid = integral(a - 0.5, b + 0.5);
        const double trap = integral(a, b) + 0.5 * (term(k, pmf(a)).mid() + term(k, pmf(b)).mid());
        const Interval out = Interval::hull(mid, trap);
        return out.widened_rel(1e-12 + 64 * kU * n);
    }

    void visit(const IndexRange& r, bool ascending, const Distribution::Visitor& fn) const override {
        if (r.empty()) return;
        if (ascending) {
            for (double i = r.first; i <= r.last; i += 1) fn(pmf(i), 1.0);
        } else {
            for (double i = r.last; i >= r.first; i -= 1) fn(pmf(i), 1.0);
        }
    }

    std::vector<double> probabilities() const override {
        std::vector<double> out;
        for (double i = 1; i <= k_; i += 1) out.push_back(theta_point(i));
        return out;
    }

  private:
    double lambda_, n_, k_, ct_;
};

}  // namespace detail

using detail::IndexRange;

namespace {

double integral_k(double value, const char* what) {
    const double k = std::round(value);
    if (k < 1 || std::fabs(value - k) > 1e-9) {
        throw DomainError(std::string(what) + ": n/lambda must be a positive integer");
    }
    return k;
}

std::shared_ptr<detail::RunsModel> uniform_model(Family f, double k, double param, double n) {
    const Interval theta = Interval(1.0) / Interval(k);
    std::vector<detail::RunsModel::Run> runs{{theta, 1.0 / k, k}};
    return std::make_shared<detail::RunsModel>(f, std::move(runs), param, n);
}

}  // namespace

Distribution Distribution::uniform_k(std::int64_t k) {
    if (k < 1) throw DomainError("uniform: k must be >= 1");
    return Distribution(uniform_model(Family::uniform_k, static_cast<double>(k), static_cast<double>(k), 0));
}

Distribution Distribution::uniform_rate(double lambda, double n) {
    if (!(lambda > 0 && lambda < n) && !(lambda > 0 && lambda == n)) throw DomainError("uniform: need 0 < lambda <= n");
    const double k = integral_k(n / lambda, "uniform");
    return Distribution(uniform_model(Family::uniform_rate, k, lambda, n));
}

Distribution Distribution::slow_integer(double gamma, const DistributionOptions& opts) {
    if (!(gamma > 0)) throw DomainError("slowint: gamma must be > 0");
    return Distribution(std::make_shared<detail::SlowIntegerModel>(gamma, opts));
}

Distribution Distribution::zipf(double gamma, const DistributionOptions& opts) {
    if (!(gamma > 0)) throw DomainError("zipf: gamma must be > 0");
    return Distribution(std::make_shared<detail::ZipfModel>(gamma, opts));
}

Distribution Distribution::geometric(double p, const DistributionOptions& opts) {
    if (!(p > 0 && p < 1)) throw DomainError("geom: p must lie in (0,1)");
    auto m = std::make_shared<detail::GeometricModel>(p);
    m->opts = opts;
    return Distribution(m);
}

Distribution Distribution::linear(double lambda, double n, const DistributionOptions& opts) {
    if (!(lambda > 0 && lambda < n)) throw DomainError("linear: need 0 < lambda < n");
    const double k = integral_k(n / lambda, "linear");
    return Distribution(std::make_shared<detail::LinearModel>(lambda, n, k, opts));
}

Distribution Distribution::explicit_vector(std::vector<double> theta) {
    if (theta.empty()) throw DomainError("explicit: empty probability vector");
    long double total = 0;
    for (double t : theta) {
        if (!(t > 0 && t <= 1)) throw DomainError("explicit: probabilities must lie in (0,1]");
        total += t;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12) throw DomainError("explicit: probabilities must sum to 1");
    std::sort(theta.begin(), theta.end());
    std::vector<detail::RunsModel::Run> runs;
    for (double t : theta) {
        if (!runs.empty() && runs.back().point == t) {
            runs.back().mult += 1;
        } else {
            runs.push_back({Interval(t), t, 1.0});
        }
    }
    const double k = static_cast<double>(theta.size());
    return Distribution(std::make_shared<detail::RunsModel>(Family::explicit_vector, std::move(runs), k, 0));
}

Family Distribution::family() const { return model_->family(); }
std::string Distribution::name() const { return model_->name(); }
std::string Distribution::params() const { return model_->params(); }
double Distribution::parameter() const { return model_->parameter(); }
double Distribution::rate_n() const { return model_->rate_n(); }
bool Distribution::infinite_support() const { return model_->infinite(); }
double Distribution::support_size() const { return model_->size(); }
Interval Distribution::normalizer() const { return model_->normalizer(); }
Interval Distribution::pmf(double j) const {
    if (!(j >= 1.0 && j == std::floor(j) && j <= model_->size())) throw DomainError("pmf: index out of support");
    return model_->pmf(j);
}
const DistributionOptions& Distribution::options() const { return model_->opts; }
IidEntropy Distribution::iid_entropy() const { return model_->entropy(); }
std::vector<double> Distribution::probabilities() const { return model_->probabilities(); }

double Distribution::band_count(double lo, double hi) const {
    if (!(hi > lo)) return 0.0;
    return model_->count(model_->band(lo, hi));
}

Interval Distribution::band_sum(SumKind kind, double lo, double hi) const {
    if (!(hi > lo)) return Interval(0.0);
    if (kind == SumKind::mass && lo <= 0.0) return model_->mass_below(hi);
    return model_->sum(kind, model_->band(lo, hi));
}

BandStats Distribution::range_stats(double lo, double hi) const {
    BandStats s;
    if (!(hi > lo)) return s;
    const IndexRange r = model_->band(lo, hi);
    s.count = Interval(model_->count(r));
    if (r.empty()) return s;
    s.mass = lo <= 0.0 ? model_->mass_below(hi) : model_->sum(SumKind::mass, r);
    s.sq_mass = model_->sum(SumKind::sq, r);
    s.cube_mass = model_->sum(SumKind::cube, r);
    s.neg_entropy_mass = model_->sum(SumKind::neg_entropy, r);
    s.sq_neg_entropy_mass = model_->sum(SumKind::sq_neg_entropy, r);
    return s;
}

void Distribution::visit_band(double lo, double hi, const Visitor& fn, bool ascending) const {
    if (!(hi > lo)) return;
    const IndexRange r = model_->band(lo, hi);
    if (r.empty()) return;
    const double c = model_->count(r);
    // tabulated models visit runs, so only the run count matters there
    const bool runs = model_->family() == Family::uniform_k || model_->family() == Family::uniform_rate ||
                      model_->family() == Family::explicit_vector;
    const double work = runs ? r.last - r.first + 1.0 : c;
    if (!(work <= model_->opts.max_enumeration)) {
        throw TooLargeError("band holds too many symbols to enumerate", work);
    }
    model_->visit(r, ascending, fn);
}

// ---------------------------------------------------------------------------

Interval zipf_zeta_integral_bracket(double gamma) {
    const double g2 = gamma * std::pow(2.0, gamma);
    const double lo = (g2 + 1.0) / g2;
    const double g21 = gamma * std::pow(2.0, gamma + 1.0);
    const double hi = (g21 + gamma + 2.0) / g21;
    return Interval(lo, hi).widened(4);
}

Interval slow_integer_alpha_integral_bracket(double gamma) {
    const double l3 = std::log2(3.0);
    const double common = 0.5 + kLn2 / (gamma * std::pow(l3, gamma));
    const double lo = 1.0 / (common + 1.0 / (3.0 * std::pow(l3, 1.0 + gamma)));
    const double hi = 1.0 / common;
    return Interval(lo, hi).widened(4);
}

namespace {

std::map<std::string, double> parse_kv(std::string_view body, std::string_view spec) {
    std::map<std::string, double> kv;
    std::string s(body);
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("bad parameter '" + item + "' in '" + std::string(spec) + "'");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        try {
            std::size_t used = 0;
            const double v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
            kv[key] = v;
        } catch (const std::exception&) {
            throw ParseError("bad number '" + val + "' in '" + std::string(spec) + "'");
        }
    }
    return kv;
}

double need(const std::map<std::string, double>& kv, const char* key, std::string_view spec) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string("missing '") + key + "' in '" + std::string(spec) + "'");
    return it->second;
}

std::vector<double> parse_number_list(const std::string& text, char sep) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto b = item.find_first_not_of(" \t\r");
        if (b == std::string::npos || item[b] == '#') continue;
        const auto e = item.find_last_not_of(" \t\r");
        const std::string tok = item.substr(b, e - b + 1);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError("bad probability '" + tok + "'");
        }
    }
    return out;
}

}  // namespace

Distribution parse_distribution(std::string_view spec, const DistributionOptions& opts) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ParseError("distribution spec needs 'family:params': '" + std::string(spec) + "'");
    const std::string fam(spec.substr(0, colon));
    const std::string_view body = spec.substr(colon + 1);
    try {
        if (fam == "explicit") {
            std::vector<double> theta;
            if (!body.empty() && body[0] == '@') {
                std::ifstream in(std::string(body.substr(1)));
                if (!in) throw ParseError("cannot open '" + std::string(body.substr(1)) + "'");
                std::stringstream buf;
                buf << in.rdbuf();
                theta = parse_number_list(buf.str(), '\n');
            } else {
                theta = parse_number_list(std::string(body), ',');
            }
            return Distribution::explicit_vector(std::move(theta));
        }
        const auto kv = parse_kv(body, spec);
        if (fam == "uniform") {
            if (kv.count("k")) {
                const double k = need(kv, "k", spec);
                if (k != std::floor(k)) throw ParseError("uniform: k must be an integer");
                return Distribution::uniform_k(static_cast<std::int64_t>(k));
            }
            return Distribution::uniform_rate(need(kv, "lambda", spec), need(kv, "n", spec));
        }
        if (fam == "slowint") return Distribution::slow_integer(need(kv, "gamma", spec), opts);
        if (fam == "zipf") return Distribution::zipf(need(kv, "gamma", spec), opts);
        if (fam == "geom") return Distribution::geometric(need(kv, "p", spec), opts);
        if (fam == "linear") return Distribution::linear(need(kv, "lambda", spec), need(kv, "n", spec), opts);
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
    throw ParseError("unknown distribution family '" + fam + "'");
}

}  // namespace pattent
