#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pattent/parallel.hpp"

namespace pattent::cli {

const std::vector<std::string> kBoundsColumns = {
    "distribution", "params", "n",      "mode",   "eps", "eps0", "eps2", "nHX_lo", "nHX_hi", "LB", "UB",
    "gap_LB",       "gap_UB", "S1",     "S2",     "S3",  "S4",   "U",    "R0",     "R1",     "R01"};

std::string format_number(double v, int digits) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

namespace {

// Shortest round-trip text, used to rebuild distribution specs.
std::string exact_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string join_header(const std::vector<std::string>& cols) {
    std::string s;
    for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
    return s;
}

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

double parse_double(const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) throw ParseError("not a number: '" + t + "'");
    return v;
}

bool needs_rate_n(std::string_view family) { return family == "linear" || family == "uniform"; }

// uniform:lambda=... and linear:... take n from the command line when absent.
std::string complete_dist_spec(const std::string& spec, double n) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) return spec;
    const std::string fam = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (fam == "linear" || (fam == "uniform" && rest.find("lambda=") != std::string::npos)) {
        for (const auto& kv : split(rest, ',')) {
            if (kv.rfind("n=", 0) == 0) return spec;
        }
        return spec + ",n=" + exact_number(n);
    }
    return spec;
}

double aux_or_nan(const ClosedFormResult& r, const char* key) {
    const auto it = r.aux.find(key);
    return it == r.aux.end() ? NAN : it->second;
}

int report(const std::exception_ptr& ep, std::ostream& err) {
    try {
        std::rethrow_exception(ep);
    } catch (const InfeasibleError& e) {
        err << "error: infeasible bound (term " << e.term() << "): " << e.what() << '\n';
        return exit_infeasible;
    } catch (const TooLargeError& e) {
        err << "error: instance too large: " << e.what() << '\n';
        return exit_too_large;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

std::string describe(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const InfeasibleError& e) {
        return std::string("infeasible (term ") + e.term() + "): " + e.what();
    } catch (const TooLargeError& e) {
        return std::string("too large: ") + e.what();
    } catch (const std::exception& e) {
        return e.what();
    }
}

}  // namespace

std::string bounds_row(const ClosedFormResult& r, const OutputOptions& out, Scale scale) {
    const int d = out.digits;
    const double s = scale == Scale::per_symbol && r.n > 0 ? 1.0 / r.n : 1.0;
    const bool asym = r.mode == BoundMode::asymptotic;
    const bool finite_h = std::isfinite(r.nHX.hi) && !r.iid_infinite;

    auto num = [&](double v) { return format_number(v, d); };
    auto scaled = [&](double v) { return format_number(v * s, d); };
    auto param = [&](const char* key) { return asym ? std::string() : num(aux_or_nan(r, key)); };

    double S1 = NAN, S2 = NAN, S3 = NAN, S4 = NAN, U = NAN, R0 = NAN, R1 = NAN, R01 = NAN;
    if (!asym) {
        if (r.lower) {
            S1 = r.lower->S1;
            S2 = r.lower->S2;
            S3 = r.lower->S3;
            S4 = r.lower->S4;
        } else {
            S1 = aux_or_nan(r, "S1");
            S2 = aux_or_nan(r, "S2");
            S3 = aux_or_nan(r, "S3");
            S4 = aux_or_nan(r, "S4");
        }
        if (r.upper) {
            U = r.upper->U;
            R0 = r.upper->R0;
            R1 = r.upper->R1;
            R01 = r.upper->R01;
        } else {
            U = aux_or_nan(r, "U");
            R0 = aux_or_nan(r, "R0");
            R1 = aux_or_nan(r, "R1");
            R01 = aux_or_nan(r, "R01");
        }
    }

    std::vector<std::string> f;
    f.push_back(csv_field(r.family));
    f.push_back(csv_field(r.params));
    f.push_back(num(r.n));
    f.push_back(to_string(r.mode));
    f.push_back(param("eps"));
    f.push_back(param("eps0"));
    f.push_back(param("eps2"));
    f.push_back(finite_h ? scaled(r.nHX.lo) : "inf");
    f.push_back(finite_h ? scaled(r.nHX.hi) : "inf");
    f.push_back(scaled(r.LB));
    f.push_back(scaled(r.UB));
    f.push_back(finite_h ? scaled(r.nHX.hi - r.LB) : "");
    f.push_back(finite_h ? scaled(r.nHX.lo - r.UB) : "");
    for (double v : {S1, S2, S3, S4, U, R0, R1, R01}) f.push_back(scaled(v));
    std::string line;
    for (std::size_t i = 0; i < f.size(); ++i) line += (i ? "," : "") + f[i];
    return line;
}

ClosedFormResult evaluate_bounds(const Distribution& dist, double n, BoundMode mode, const std::string& search,
                                 unsigned jobs) {
    if (!(n >= 1) || n != std::floor(n)) throw ParseError("n must be a positive integer");
    if (mode == BoundMode::general && !search.empty()) {
        ParamSearchSpec s = ParamSearchSpec::parse(search, n);
        s.jobs = jobs;
        ClosedFormResult r = general_bounds_result(dist, n, s);
        r.mode = BoundMode::general;
        return r;
    }
    ClosedFormOptions opt;
    opt.jobs = jobs;
    return family_bounds(dist, n, mode, opt);
}

int cmd_bounds(const BoundsRequest& req, const OutputOptions& out, std::ostream& os, std::ostream& err) {
    std::vector<std::string> rows;
    try {
        if (req.modes.empty()) throw ParseError("at least one --mode is required");
        const Distribution dist = parse_distribution(complete_dist_spec(req.dist, req.n));
        for (BoundMode m : req.modes) rows.push_back(bounds_row(evaluate_bounds(dist, req.n, m, req.search, out.jobs), out));
    } catch (...) {
        return report(std::current_exception(), err);
    }
    if (out.header) os << join_header(kBoundsColumns) << '\n';
    for (const auto& r : rows) os << r << '\n';
    return exit_ok;
}

std::vector<double> parse_theta(std::string_view text) {
    std::string body(text);
    if (!body.empty() && body[0] == '@') {
        std::ifstream in(body.substr(1));
        if (!in) throw ParseError("cannot read probability file '" + body.substr(1) + "'");
        std::ostringstream ss;
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            for (char& c : line) {
                if (c == ' ' || c == '\t' || c == ';') c = ',';
            }
            ss << line << ',';
        }
        body = ss.str();
    }
    std::vector<double> theta;
    for (const auto& tok : split(body, ',')) {
        if (!tok.empty()) theta.push_back(parse_double(tok));
    }
    if (theta.empty()) throw ParseError("empty probability vector");
    return theta;
}

int cmd_exact(const ExactRequest& req, const OutputOptions& out, std::ostream& os, std::ostream& err) {
    std::ostringstream body;
    try {
        if (req.n < 0) throw ParseError("--n must be >= 0");
        if (req.conditional < 0) throw ParseError("--conditional must be >= 0");
        const std::vector<double> theta = parse_theta(req.theta);
        const int top = std::max(req.n, req.conditional);
        // largest instance first so an oversized request fails before any work
        if (top >= 1) exact_pattern_entropy(theta, top, req.limits);
        std::vector<double> block(top + 1, 0.0);
        for (int m = 1; m <= top; ++m) block[m] = exact_pattern_entropy(theta, m, req.limits);
        for (int m = 1; m <= req.n; ++m) body << "block," << m << ',' << format_number(block[m], out.digits) << '\n';
        for (int l = 1; l <= req.conditional; ++l) {
            const double c = l == 1 ? 0.0 : block[l] - block[l - 1];
            body << "conditional," << l << ',' << format_number(c, out.digits) << '\n';
        }
        if (req.patterns) {
            const BruteForceResult bf = brute_force_pattern_entropy(theta, req.n);
            body << '\n' << bf.table.to_csv(out.digits);
        }
    } catch (...) {
        return report(std::current_exception(), err);
    }
    if (out.header) os << "quantity,index,bits\n";
    os << body.str();
    return exit_ok;
}

// ---- sweep specs

namespace {

std::vector<double> parse_values(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    auto args_of = [&](std::size_t skip) {
        if (v.back() != ')') throw ParseError(key + ": unterminated '" + v + "'");
        std::vector<double> a;
        for (const auto& t : split(std::string_view(v).substr(skip, v.size() - skip - 1), ',')) a.push_back(parse_double(t));
        if (a.size() != 3) throw ParseError(key + ": expected three arguments in '" + v + "'");
        return a;
    };
    std::vector<double> out;
    if (v.rfind("logrange(", 0) == 0) {
        const auto a = args_of(9);
        const double count = a[2];
        if (!(a[0] > 0 && a[1] > 0) || count < 1 || count != std::floor(count)) {
            throw ParseError(key + ": logrange needs positive endpoints and an integer count");
        }
        const auto c = static_cast<int>(count);
        for (int i = 0; i < c; ++i) {
            const double t = c == 1 ? 0.0 : static_cast<double>(i) / (c - 1);
            double x = std::exp(std::log(a[0]) + t * (std::log(a[1]) - std::log(a[0])));
            // keep integer-valued endpoints and decades exact
            const double r = std::round(x);
            if (std::fabs(x - r) <= 1e-9 * std::fabs(x)) x = r;
            out.push_back(x);
        }
    } else if (v.rfind("range(", 0) == 0) {
        const auto a = args_of(6);
        if (!(a[2] > 0)) throw ParseError(key + ": range step must be positive");
        const double len = (a[1] - a[0]) / a[2];
        const auto steps = static_cast<long>(std::floor(len + 1e-9));
        for (long i = 0; i <= steps; ++i) {
            double x = a[0] + static_cast<double>(i) * a[2];
            x = std::round(x * 1e12) / 1e12;
            out.push_back(x);
        }
    } else {
        for (const auto& t : split(v, ',')) {
            if (t.empty()) continue;
            out.push_back(parse_double(t));
        }
    }
    if (out.empty()) throw ParseError(key + ": empty value list");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i] > out[i - 1])) throw ParseError(key + ": swept values must be strictly increasing");
    }
    return out;
}

bool is_global_key(const std::string& k) {
    return k == "kind" || k == "family" || k == "modes" || k == "scale" || k == "search" || k == "alphabet" ||
           k == "step" || k == "conditional";
}

}  // namespace

SweepSpec parse_sweep_spec(std::string_view text) {
    SweepSpec spec;
    std::vector<std::pair<std::string, std::string>> defaults;
    std::vector<std::vector<std::pair<std::string, std::string>>> sections;
    bool have_modes = false;
    std::string section = "sweep";
    int lineno = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ParseError("line " + std::to_string(lineno) + ": bad section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (section == "series") {
                sections.emplace_back();
            } else if (section != "sweep") {
                throw ParseError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");

        if (section == "sweep" && is_global_key(key)) {
            if (key == "kind") {
                if (value == "bounds") {
                    spec.kind = SweepSpec::Kind::bounds;
                } else if (value == "exact") {
                    spec.kind = SweepSpec::Kind::exact;
                } else {
                    throw ParseError("kind must be bounds or exact");
                }
            } else if (key == "family") {
                spec.family = value;
            } else if (key == "modes") {
                have_modes = true;
                for (const auto& m : split(value, ',')) {
                    if (!m.empty()) spec.modes.push_back(parse_mode(m));
                }
            } else if (key == "scale") {
                if (value == "none") {
                    spec.scale = Scale::none;
                } else if (value == "per_symbol") {
                    spec.scale = Scale::per_symbol;
                } else {
                    throw ParseError("scale must be none or per_symbol");
                }
            } else if (key == "search") {
                spec.search = value;
            } else if (key == "alphabet") {
                spec.alphabet = static_cast<int>(parse_double(value));
            } else if (key == "step") {
                spec.step = parse_double(value);
            } else if (key == "conditional") {
                spec.conditional = static_cast<int>(parse_double(value));
            }
            continue;
        }
        auto& target = section == "sweep" ? defaults : sections.back();
        target.emplace_back(key, value);
    }

    if (spec.kind == SweepSpec::Kind::exact) {
        if (spec.alphabet < 2) throw ParseError("exact sweep: alphabet must be >= 2");
        if (!(spec.step > 0 && spec.step < 1)) throw ParseError("exact sweep: step must lie in (0, 1)");
        const double cells = 1.0 / spec.step;
        if (std::fabs(cells - std::round(cells)) > 1e-9) throw ParseError("exact sweep: 1/step must be an integer");
        if (spec.conditional < 1) throw ParseError("exact sweep: conditional must be >= 1");
        return spec;
    }

    if (spec.family.empty()) throw ParseError("sweep: missing family");
    if (!have_modes) spec.modes.push_back(BoundMode::finite_n);
    if (spec.modes.empty()) throw ParseError("sweep: at least one mode is required");
    if (sections.empty()) sections.emplace_back();
    for (const auto& sec : sections) {
        std::vector<std::pair<std::string, std::string>> merged = defaults;
        for (const auto& [k, v] : sec) {
            bool replaced = false;
            for (auto& kv : merged) {
                if (kv.first == k) {
                    kv.second = v;
                    replaced = true;
                }
            }
            if (!replaced) merged.emplace_back(k, v);
        }
        SweepSeries s;
        bool have_n = false;
        for (const auto& [k, v] : merged) {
            const std::vector<double> vals = parse_values(k, v);
            if (k == "n") have_n = true;
            if (vals.size() == 1) {
                s.fixed.emplace_back(k, vals[0]);
            } else {
                if (!s.swept.empty()) throw ParseError("sweep: only one swept variable per series ('" + s.swept + "', '" + k + "')");
                s.swept = k;
                s.values = vals;
            }
        }
        if (!have_n) throw ParseError("sweep: every series needs n");
        if (s.swept.empty()) {
            // a single point: sweep over its n
            for (auto it = s.fixed.begin(); it != s.fixed.end(); ++it) {
                if (it->first == "n") {
                    s.swept = "n";
                    s.values = {it->second};
                    s.fixed.erase(it);
                    break;
                }
            }
        }
        spec.series.push_back(std::move(s));
    }
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read sweep spec '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sweep_spec(ss.str());
}

namespace {

struct SweepTask {
    std::string dist;
    std::string family, params;  // labels for error rows
    double n = 0;
    BoundMode mode = BoundMode::finite_n;
};

int sweep_bounds(const SweepSpec& spec, const OutputOptions& out, std::ostream& os) {
    std::vector<SweepTask> tasks;
    for (const auto& s : spec.series) {
        for (double v : s.values) {
            std::vector<std::pair<std::string, double>> kv = s.fixed;
            kv.emplace_back(s.swept, v);
            double n = 0;
            std::string params;
            for (const auto& [k, x] : kv) {
                if (k == "n") {
                    n = x;
                    continue;
                }
                params += (params.empty() ? "" : ",") + k + "=" + exact_number(x);
            }
            if (needs_rate_n(spec.family) && params.find("lambda=") != std::string::npos) {
                params += ",n=" + exact_number(n);
            }
            for (BoundMode m : spec.modes) {
                SweepTask t;
                t.dist = spec.family + ":" + params;
                t.family = spec.family;
                t.params = params;
                std::replace(t.params.begin(), t.params.end(), ',', ';');
                t.n = n;
                t.mode = m;
                tasks.push_back(std::move(t));
            }
        }
    }
    std::vector<std::string> rows(tasks.size());
    const unsigned jobs = std::max(1u, out.jobs);
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        const SweepTask& t = tasks[i];
        try {
            const Distribution dist = parse_distribution(t.dist);
            rows[i] = bounds_row(evaluate_bounds(dist, t.n, t.mode, spec.search, 1), out, spec.scale) + ",";
        } catch (...) {
            std::string line = csv_field(t.family) + "," + csv_field(t.params) + "," + format_number(t.n, out.digits) +
                               "," + to_string(t.mode);
            for (std::size_t c = 4; c < kBoundsColumns.size(); ++c) line += ",";
            rows[i] = line + "," + csv_field(describe(std::current_exception()));
        }
    });
    if (out.header) os << join_header(kBoundsColumns) << ",error\n";
    for (const auto& r : rows) os << r << '\n';
    return exit_ok;
}

void compositions(int parts, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int c = 1; c <= total - parts + 1; ++c) {
        cur.push_back(c);
        compositions(parts - 1, total - c, cur, out);
        cur.pop_back();
    }
}

int sweep_exact(const SweepSpec& spec, const OutputOptions& out, std::ostream& os) {
    const int cells = static_cast<int>(std::lround(1.0 / spec.step));
    std::vector<std::vector<int>> points;
    std::vector<int> cur;
    if (cells >= spec.alphabet) compositions(spec.alphabet, cells, cur, points);
    std::vector<std::string> rows(points.size());
    parallel_for(points.size(), std::max(1u, out.jobs), [&](std::size_t i) {
        std::vector<double> theta;
        std::string label;
        for (int c : points[i]) {
            theta.push_back(static_cast<double>(c) / cells);
            label += (label.empty() ? "" : ";") + format_number(theta.back(), out.digits);
        }
        std::string text;
        try {
            double hx = 0;
            for (double t : theta) hx -= t * std::log2(t);
            double prev = 0;
            for (int l = 1; l <= spec.conditional; ++l) {
                const double h = exact_pattern_entropy(theta, l);
                const double c = l == 1 ? 0.0 : h - prev;
                prev = h;
                text += label + ",conditional," + std::to_string(l) + "," + format_number(c, out.digits) + "," +
                        format_number(hx, out.digits) + "," + format_number(c - hx, out.digits) + ",\n";
            }
        } catch (...) {
            text += label + ",conditional,,,,," + csv_field(describe(std::current_exception())) + "\n";
        }
        rows[i] = text;
    });
    if (out.header) os << "theta,quantity,index,bits,HX,excess,error\n";
    for (const auto& r : rows) os << r;
    return exit_ok;
}

}  // namespace

int cmd_sweep(const SweepSpec& spec, const OutputOptions& out, std::ostream& os, std::ostream& err) {
    try {
        if (spec.kind == SweepSpec::Kind::exact) return sweep_exact(spec, out, os);
        if (spec.series.empty()) throw ParseError("sweep: no series");
        for (const auto& s : spec.series) {
            if (s.values.empty()) throw ParseError("sweep: empty sweep list");
        }
        return sweep_bounds(spec, out, os);
    } catch (...) {
        return report(std::current_exception(), err);
    }
}

// ---- argument parsing

int run(const std::vector<std::string>& args, std::ostream& os, std::ostream& err) {
    CLI::App app{"Bounds and exact values for the entropy of i.i.d. sequence patterns", "pattent"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    OutputOptions out;
    out.jobs = default_jobs();
    bool no_header = false;
    app.add_option("--digits", out.digits, "Significant digits in CSV output")->check(CLI::Range(1, 17));
    app.add_option("--jobs", out.jobs, "Worker threads (default: PATTENT_JOBS or 1)")->check(CLI::PositiveNumber);
    app.add_flag("--no-header", no_header, "Omit the CSV header row");

    BoundsRequest breq;
    std::vector<std::string> modes;
    auto* bounds = app.add_subcommand("bounds", "Lower and upper bounds for one distribution");
    bounds->add_option("dist", breq.dist, "Distribution spec, e.g. geom:p=0.05 or zipf:gamma=1")->required();
    bounds->add_option("--n", breq.n, "Sequence length")->required();
    bounds->add_option("--mode", modes, "asymptotic, finite_n, general or all (repeatable)")->delimiter(',');
    bounds->add_option("--search", breq.search, "Parameter grid for general mode, key=value;...");

    ExactRequest ereq;
    auto* exact = app.add_subcommand("exact", "Exact pattern block and conditional entropies");
    exact->add_option("--theta", ereq.theta, "Probabilities, inline (0.2,0.8) or @file")->required();
    exact->add_option("--n", ereq.n, "Largest block length")->required();
    exact->add_option("--conditional", ereq.conditional, "Also emit H(Psi_l | Psi^(l-1)) for l = 1..L");
    exact->add_flag("--patterns", ereq.patterns, "Append the brute-force pattern table");
    exact->add_option("--max-n", ereq.limits.max_n, "Block length cap");
    exact->add_option("--max-k", ereq.limits.max_k, "Alphabet size cap");
    exact->add_flag("--allow-large", ereq.limits.allow_large, "Acknowledge running above the caps");

    std::string spec_path;
    auto* sweep = app.add_subcommand("sweep", "Evaluate a sweep spec file (see presets/)");
    sweep->add_option("spec", spec_path, "Sweep spec file")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, os, err);
        return code == 0 ? exit_ok : exit_usage;
    }
    out.header = !no_header;

    if (*bounds) {
        if (!modes.empty()) {
            breq.modes.clear();
            for (const auto& m : modes) {
                if (m == "all") {
                    breq.modes = {BoundMode::asymptotic, BoundMode::finite_n, BoundMode::general};
                    continue;
                }
                try {
                    breq.modes.push_back(parse_mode(m));
                } catch (const ParseError& e) {
                    err << "error: " << e.what() << '\n';
                    return exit_usage;
                }
            }
        }
        return cmd_bounds(breq, out, os, err);
    }
    if (*exact) return cmd_exact(ereq, out, os, err);
    SweepSpec spec;
    try {
        spec = load_sweep_spec(spec_path);
    } catch (...) {
        return report(std::current_exception(), err);
    }
    return cmd_sweep(spec, out, os, err);
}

int run(int argc, const char* const* argv, std::ostream& os, std::ostream& err) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, os, err);
}

}  // namespace pattent::cli
