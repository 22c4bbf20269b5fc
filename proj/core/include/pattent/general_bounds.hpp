// General lower and upper bounds on the pattern block entropy, assembled
// term by term, and a grid search over their epsilon parameters.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pattent/distribution.hpp"
#include "pattent/grids.hpp"
#include "pattent/interval.hpp"

namespace pattent {

// A bound could not be evaluated at the requested parameters.
class InfeasibleError : public std::runtime_error {
  public:
    InfeasibleError(const std::string& term, const std::string& why)
        : std::runtime_error(term + ": " + why), term_(term) {}
    const std::string& term() const { return term_; }

  private:
    std::string term_;
};

enum class S1Variant { b0, b1, b2 };
enum class S2Variant { none, exact_mean, b1, b2 };
enum class S4Variant { binary_entropy, binomial };
enum class RVariant { none, Rb, R0 };
enum class Packing { separate_bins, merged_bin };

const char* to_string(S1Variant v);
const char* to_string(S2Variant v);
const char* to_string(S4Variant v);
const char* to_string(RVariant v);
const char* to_string(Packing p);

inline const double kDefaultThetaMinus = std::exp(-5.5);
inline const double kDefaultThetaPlus = std::exp(1.4);

// f(theta-, theta+): min over both arguments of
// (t-1)/ln t * ln((t-1)/(e ln t)) + 1.
double separation_exponent(double theta_minus, double theta_plus);

struct LowerBoundBreakdown {
    double n = 0;
    double eps = 0, eps0 = 0;
    double theta_minus = 0, theta_plus = 0;

    double k_head = 0;  // k - k01, symbols above 1/n^(1-eps)
    double k01 = 0;
    Interval phi01;
    Interval L01;
    Interval H01;  // bits per symbol

    double S1 = 0;  // upper-directed
    S1Variant s1_variant = S1Variant::b0;
    double S1_b0 = NAN, S1_b1 = NAN, S1_b2 = NAN;

    double S2 = 0;  // lower-directed
    S2Variant s2_variant = S2Variant::none;
    double S2_exact = NAN, S2_b1 = NAN, S2_b2 = NAN;

    double S3 = 0;  // lower-directed

    double S4 = 0;  // upper-directed
    S4Variant s4_variant = S4Variant::binary_entropy;
    double k_theta_minus = 0, k_theta_plus = 0;

    double eps_n = 0, eps_prime_n = 0, f_value = 0;
    double LB = 0;
};

struct UpperBoundBreakdown {
    double n = 0;
    double eps0 = 0, eps1 = 0, eps2 = 0;
    Packing packing = Packing::separate_bins;

    Interval phi0, phi1, phi01;
    Interval H_packed;  // bits per symbol

    double U = 0;  // lower-directed, >= 0
    double U_first = 0, U_correction = 0;

    // Upper-directed loss terms; NaN when the packing does not use them.
    double R0 = NAN, R1 = NAN, R01 = NAN;
    RVariant r0_variant = RVariant::none, r1_variant = RVariant::none, r01_variant = RVariant::none;

    double UB = 0;
};

LowerBoundBreakdown lower_bound_general(const HeadTable& table, double eps, double eps0,
                                        double theta_minus = kDefaultThetaMinus,
                                        double theta_plus = kDefaultThetaPlus);
LowerBoundBreakdown lower_bound_general(const Distribution& dist, double n, double eps, double eps0,
                                        double theta_minus = kDefaultThetaMinus,
                                        double theta_plus = kDefaultThetaPlus);

UpperBoundBreakdown upper_bound_general(const HeadTable& table, double eps0, double eps1, double eps2,
                                        Packing packing);
UpperBoundBreakdown upper_bound_general(const Distribution& dist, double n, double eps0, double eps1, double eps2,
                                        Packing packing);

// Grid of candidate parameters. Lower bound: eps = c * eps_base for c in
// eps_coeffs, crossed with eps0_values. Upper bound: eps1_values x
// ub_eps0_values x (ub_eps2_coeffs * eps_base, clamped to >= max(0, eps1))
// x packings, skipping points with eps0 <= eps1.
struct ParamSearchSpec {
    double eps_base = 0;  // 0: max(ln ln n / ln n, 0.1)
    std::vector<double> eps_coeffs;
    std::vector<double> eps0_values;
    std::vector<double> eps_extra;  // absolute eps values added to the lower-bound sweep
    double theta_minus = kDefaultThetaMinus;
    double theta_plus = kDefaultThetaPlus;

    std::vector<double> eps1_values;
    std::vector<double> ub_eps0_values;
    std::vector<double> ub_eps2_coeffs;
    std::vector<Packing> packings;

    unsigned jobs = 1;

    static ParamSearchSpec defaults(double n);
    // key=value pairs separated by ';' or newlines; list values separated by
    // ','. Keys: eps_base, eps_coeffs, eps0, eps_extra, theta_minus,
    // theta_plus, eps1, ub_eps0, ub_eps2_coeffs, packing (separate|merged|both), jobs.
    static ParamSearchSpec parse(std::string_view text, double n);
    std::string serialize() const;
};

double default_eps_base(double n);

struct LowerOptimum {
    LowerBoundBreakdown best;
    std::size_t evaluated = 0;
    std::size_t feasible = 0;
};
struct UpperOptimum {
    UpperBoundBreakdown best;
    std::size_t evaluated = 0;
    std::size_t feasible = 0;
};

// Throws InfeasibleError("optimizer", ...) when no point is feasible.
LowerOptimum optimize_lower(const HeadTable& table, const ParamSearchSpec& search);
UpperOptimum optimize_upper(const HeadTable& table, const ParamSearchSpec& search);
LowerOptimum optimize_lower(const Distribution& dist, double n, const ParamSearchSpec& search);
UpperOptimum optimize_upper(const Distribution& dist, double n, const ParamSearchSpec& search);

}  // namespace pattent
