// Per-family bounds: closed forms where they exist, family-tuned recipes
// for finite n, and the leading-term asymptotic expressions.
#pragma once

#include <map>
#include <optional>
#include <string>

#include "pattent/distribution.hpp"
#include "pattent/general_bounds.hpp"
#include "pattent/interval.hpp"

namespace pattent {

enum class BoundMode { asymptotic, finite_n, general };

const char* to_string(BoundMode m);
BoundMode parse_mode(const std::string& s);

struct ClosedFormResult {
    std::string family;
    std::string params;
    double n = 0;
    BoundMode mode = BoundMode::finite_n;

    // Rigorous bounds in bits. Asymptotic mode fills them with the
    // leading-term values, which are not bounds at finite n.
    double LB = NAN, UB = NAN;
    double asymptotic_LB = NAN, asymptotic_UB = NAN;
    bool rigorous = true;

    Interval nHX;  // n H(X); +inf when the entropy rate diverges
    bool iid_infinite = false;
    std::string regime;

    // Tuning and diagnostics: "alpha", "eps", "eps0", "eps1", "eps2",
    // "C_L1", "C_L2", "bg_max", "C_lambda_lo", "C_lambda_hi", term values.
    std::map<std::string, double> aux;

    std::optional<LowerBoundBreakdown> lower;
    std::optional<UpperBoundBreakdown> upper;
};

struct ClosedFormOptions {
    // alpha grid of the code-length route
    double alpha_min = 1.0 + 1e-6, alpha_max = 20.0, alpha_step = 1e-3;
    // Linear regime margin around n^(2/3) and n^0 / 2
    double linear_delta = 0.05;
    // Width of the epsilon neighborhood around the family's preferred value
    double eps_halfwidth = 1.0;
    unsigned jobs = 0;  // 0: default_jobs()
};

// Uniform over k symbols, or theta = lambda/n over k = n/lambda symbols.
ClosedFormResult uniform_bounds_k(std::int64_t k, double n, const ClosedFormOptions& opt = {});
ClosedFormResult uniform_bounds_rate(double lambda, double n, const ClosedFormOptions& opt = {});

ClosedFormResult slow_integer_bounds(double gamma, double n, BoundMode mode, const ClosedFormOptions& opt = {});
ClosedFormResult zipf_bounds(double gamma, double n, BoundMode mode, const ClosedFormOptions& opt = {});
ClosedFormResult geometric_bounds(double p, double n, BoundMode mode, const ClosedFormOptions& opt = {});
ClosedFormResult linear_bounds(double lambda, double n, BoundMode mode = BoundMode::finite_n,
                               const ClosedFormOptions& opt = {});

// Any distribution through the optimized general bounds.
ClosedFormResult general_bounds_result(const Distribution& dist, double n, const ParamSearchSpec& search);

// Dispatch on the distribution family.
ClosedFormResult family_bounds(const Distribution& dist, double n, BoundMode mode, const ClosedFormOptions& opt = {});

// Geometric constants of the asymptotic statement.
double geometric_CL1(double p);
double geometric_CL2(double p);
double geometric_bg_max(double p);

// Uniform lambda/n pieces, exposed for tests.
struct UniformRatePieces {
    double code_LB = 0, code_UB = 0, alpha = 0;
    double binned_LB = 0, binned_UB = 0;
};
UniformRatePieces uniform_rate_pieces(double lambda, double n, const ClosedFormOptions& opt = {});

}  // namespace pattent
