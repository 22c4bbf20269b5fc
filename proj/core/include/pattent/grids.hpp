// Probability grids over [0, 1] and the per-bin statistics built on them.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pattent/distribution.hpp"
#include "pattent/interval.hpp"

namespace pattent {

// eta_0 = 0, eta_1 = n^-(1+eps0), eta_2 = n^-(1+eps1),
// eta_b = b'^2 / n^(1+eps2) with b' = b + floor(n^((eps2-eps1)/2)) - 2 for b >= 3,
// and eta_{B+1} = 1. Bin b is (eta_b, eta_{b+1}].
struct EtaGrid {
    double n = 0;
    double eps0 = 0, eps1 = 0, eps2 = 0;
    double shift = 0;  // floor(n^((eps2-eps1)/2))
    std::int64_t B = 0;
    std::int64_t A = 0;  // largest index with eta_b <= 1/2

    double point(std::int64_t b) const;
    double bprime(std::int64_t b) const { return static_cast<double>(b) + shift - 2.0; }
    std::int64_t bins() const { return B + 1; }
};

// xi_b = b^2 / n^(1-eps), xi_{B+1} = 1.
struct XiGrid {
    double n = 0;
    double eps = 0;
    std::int64_t B = 0;
    std::int64_t A = 0;

    double point(std::int64_t b) const;
    std::int64_t bins() const { return B + 1; }
};

EtaGrid build_eta_grid(double n, double eps0, double eps1, double eps2);
XiGrid build_xi_grid(double n, double eps);

// Exact statistics of the largest-probability symbols, listed once in
// decreasing order with prefix sums, so band queries cost two lookups.
// Bands that reach below the tabulated range report complete = false and
// only carry the sums over their tabulated part.
class HeadTable {
  public:
    struct Sums {
        double count = 0;              // tabulated symbols in the band
        std::size_t entries = 0;       // distinct tabulated probability values
        Interval mass;                 // sum theta
        Interval neg_entropy;          // sum theta log2(1/theta)
        Interval sq_mass;              // sum theta^2
        Interval cube_mass;            // sum theta^3
        Interval sq_neg_entropy;       // sum theta^2 log2(1/theta)
        Interval distinct;             // sum 1 - (1-theta)^n
        Interval distinct_log;         // sum (1 - (1-theta)^n) log2(1/theta)
        Interval reoccurrence;         // sum n theta - 1 + exp(-n(theta + theta^2))
        Interval reoccurrence_log;     // same summand times log2(1/theta)
        bool complete = true;
    };

    HeadTable(const Distribution& dist, double n, double max_entries = 1.5e6);

    const Distribution& dist() const { return dist_; }
    double n() const { return n_; }
    double total() const { return total_; }
    // Number of symbols with theta > x.
    double count_above(double x) const;
    // True when every symbol with theta > x is tabulated.
    bool covers(double x) const { return count_above(x) <= total_; }
    Sums band(double lo, double hi) const;
    // Symbols ranked [from, to) in decreasing probability order.
    Sums span(double from, double to) const;
    // Band sum of any kind and band count over the whole support: tabulated
    // part from the table, anything below it from the distribution.
    Interval sum(SumKind kind, double lo, double hi) const;
    double count(double lo, double hi) const { return hi > lo ? count_above(lo) - count_above(hi) : 0.0; }
    double floor() const { return floor_; }
    // Probability (midpoint) of the symbol ranked `pos`.
    double theta_at(double pos) const;

  private:
    enum Col { kMass, kNegent, kSq, kCube, kSqNegent, kDistinct, kDistinctLog, kReocc, kReoccLog, kCols };
    struct Column {
        std::vector<double> lo, hi;
        double err = 0;
    };
    Interval diff(const Column& c, std::size_t a, std::size_t b) const;
    std::size_t entry_at(double count) const;

    Distribution dist_;
    double n_;
    double total_ = 0;
    double floor_ = 0;  // every symbol with theta above this is tabulated
    bool built_ = false;
    std::vector<double> cum_;    // cumulative multiplicity, size entries + 1
    std::vector<double> theta_;  // per entry
    Column cols_[kCols];
};

struct BinStat {
    double lo = 0, hi = 0;  // probability band (lo, hi]
    double count = 0;       // k_b or kappa_b (+inf for infinite tails)
    double count_prime = 0; // kappa'_b, xi-grid only
    Interval mass;
    Interval sq_mass;
    Interval cube_mass;
    Interval neg_entropy_mass;
    Interval distinct;      // L_b
};

struct BinStats {
    double n = 0;
    std::vector<BinStat> bins;
    double k01 = 0;
    Interval phi0, phi1, phi01, L01;
};

// Expected distinct symbols in a band; exact where tabulated, else the
// binomial bracket intersected with [0, min(k, n phi)].
Interval band_distinct(const HeadTable& table, double lo, double hi, double count, const Interval& mass,
                       const Interval& sq_mass, const Interval& cube_mass);

BinStats bin_stats(const Distribution& dist, const EtaGrid& grid);
BinStats bin_stats(const Distribution& dist, const XiGrid& grid);
BinStats bin_stats(const HeadTable& table, const EtaGrid& grid);
BinStats bin_stats(const HeadTable& table, const XiGrid& grid);

}  // namespace pattent
