// i.i.d. source models: the parametric families and explicit vectors.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pattent/interval.hpp"
#include "pattent/numerics.hpp"

namespace pattent {

enum class Family { uniform_k, uniform_rate, slow_integer, zipf, geometric, linear, explicit_vector };

enum class SumKind { mass, sq, cube, neg_entropy, sq_neg_entropy };

// Instance would need more enumeration work than allowed.
class TooLargeError : public std::runtime_error {
  public:
    TooLargeError(const std::string& what, double work) : std::runtime_error(what), work_(work) {}
    double work() const { return work_; }

  private:
    double work_;
};

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DistributionOptions {
    // Exact head terms used for the zeta / slow-integer normalizers.
    std::int64_t normalizer_head_terms = 1'000'000;
    // Exact terms summed before switching to integral brackets on long ranges.
    std::int64_t exact_range_terms = 200'000;
    std::int64_t tail_head_terms = 4096;
    // Largest number of symbols a band visitor may enumerate.
    double max_enumeration = 4e6;
};

// Statistics of the symbols with probability in a band (lo, hi].
struct BandStats {
    Interval count;  // hi may be +inf for infinite tails
    Interval mass;
    Interval sq_mass;
    Interval cube_mass;
    Interval neg_entropy_mass;     // sum theta log2(1/theta)
    Interval sq_neg_entropy_mass;  // sum theta^2 log2(1/theta)
};

struct IidEntropy {
    bool infinite = false;
    Interval bits;  // per symbol; meaningless when infinite
};

namespace detail {

// Symbols are addressed by a family index j (runs for tabulated models).
struct IndexRange {
    double first = 1;
    double last = 0;  // may be +inf
    bool empty() const { return !(first <= last); }
};

class Model;

}  // namespace detail

class Distribution {
  public:
    using Visitor = std::function<void(const Interval& theta, double multiplicity)>;

    static Distribution uniform_k(std::int64_t k);
    static Distribution uniform_rate(double lambda, double n);
    static Distribution slow_integer(double gamma, const DistributionOptions& opts = {});
    static Distribution zipf(double gamma, const DistributionOptions& opts = {});
    static Distribution geometric(double p, const DistributionOptions& opts = {});
    static Distribution linear(double lambda, double n, const DistributionOptions& opts = {});
    static Distribution explicit_vector(std::vector<double> theta);

    Family family() const;
    // CSV labels, e.g. "geom" and "p=0.05".
    std::string name() const;
    std::string params() const;
    // Family parameter (k, lambda, gamma, p) for closed-form dispatch.
    double parameter() const;
    double rate_n() const;  // the n of uniform_rate / linear, else 0

    bool infinite_support() const;
    double support_size() const;  // +inf for infinite support
    Interval normalizer() const;

    // Probability of the j-th symbol in the family's own indexing:
    // j = 1.. for geometric/zipf, j = 2.. for slow-integer, i = 1..k for linear
    // (increasing), and ascending rank for uniform/explicit.
    Interval pmf(double j) const;

    BandStats range_stats(double lo, double hi) const;
    double band_count(double lo, double hi) const;
    Interval band_sum(SumKind kind, double lo, double hi) const;

    // Calls fn once per probability value in (lo, hi], in increasing order of
    // theta when `ascending`, else decreasing. Throws TooLargeError if the band
    // holds more than options().max_enumeration symbols.
    void visit_band(double lo, double hi, const Visitor& fn, bool ascending = true) const;

    IidEntropy iid_entropy() const;
    const DistributionOptions& options() const;

    // Probabilities sorted nondecreasing (finite support only).
    std::vector<double> probabilities() const;

  private:
    explicit Distribution(std::shared_ptr<const detail::Model> m) : model_(std::move(m)) {}
    std::shared_ptr<const detail::Model> model_;
};

// Grammar: uniform:k=100 | uniform:lambda=1,n=1000 | slowint:gamma=0.5 |
// zipf:gamma=1 | geom:p=0.05 | linear:lambda=2,n=1000 | explicit:@file.csv |
// explicit:0.2,0.8
Distribution parse_distribution(std::string_view spec, const DistributionOptions& opts = {});

// Loose integral brackets, kept as validation checks.
Interval zipf_zeta_integral_bracket(double gamma);
Interval slow_integer_alpha_integral_bracket(double gamma);

}  // namespace pattent
