// Command-line front end. Everything except argument parsing lives here so
// the tests can drive it with in-memory streams.
#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pattent/closed_form.hpp"
#include "pattent/exact.hpp"

namespace pattent::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 2, exit_infeasible = 3, exit_too_large = 4 };

struct OutputOptions {
    int digits = 6;
    bool header = true;
    unsigned jobs = 1;
};

std::string format_number(double v, int digits);

extern const std::vector<std::string> kBoundsColumns;

struct BoundsRequest {
    std::string dist;
    double n = 0;
    std::vector<BoundMode> modes{BoundMode::finite_n};
    std::string search;  // ParamSearchSpec text for general mode
};

enum class Scale { none, per_symbol };

// One CSV row, without the trailing newline.
std::string bounds_row(const ClosedFormResult& r, const OutputOptions& out, Scale scale = Scale::none);
ClosedFormResult evaluate_bounds(const Distribution& dist, double n, BoundMode mode, const std::string& search,
                                 unsigned jobs);

int cmd_bounds(const BoundsRequest& req, const OutputOptions& out, std::ostream& os, std::ostream& err);

struct ExactRequest {
    std::string theta;  // "0.2,0.8" or "@file"
    int n = 0;
    int conditional = 0;
    bool patterns = false;  // append the brute-force pattern table
    ExactOptions limits;
};

std::vector<double> parse_theta(std::string_view text);
int cmd_exact(const ExactRequest& req, const OutputOptions& out, std::ostream& os, std::ostream& err);

// Sweep specification, see README for the file format.
struct SweepSeries {
    std::vector<std::pair<std::string, double>> fixed;
    std::string swept;  // empty when every key is single-valued
    std::vector<double> values;
};

struct SweepSpec {
    enum class Kind { bounds, exact } kind = Kind::bounds;
    std::string family;
    std::vector<BoundMode> modes;
    Scale scale = Scale::none;
    std::string search;
    std::vector<SweepSeries> series;
    // exact kind
    int alphabet = 2;
    double step = 0.05;
    int conditional = 10;
};

SweepSpec parse_sweep_spec(std::string_view text);
SweepSpec load_sweep_spec(const std::string& path);

int cmd_sweep(const SweepSpec& spec, const OutputOptions& out, std::ostream& os, std::ostream& err);

// Full command line; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& os, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& os, std::ostream& err);

}  // namespace pattent::cli
