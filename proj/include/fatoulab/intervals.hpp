#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace fatoulab {

struct Interval {
    double a = 0.0;
    double b = 0.0;  // half-open [a, b)
};

// Finite union of disjoint half-open intervals in log-radius, kept sorted.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> pieces);

    void add(double a, double b);
    [[nodiscard]] const std::vector<Interval>& intervals() const { return pieces_; }
    [[nodiscard]] bool empty() const { return pieces_.empty(); }
    [[nodiscard]] bool contains(double t) const;
    // length of the set inside (lo, hi)
    [[nodiscard]] double measure(double lo, double hi) const;

private:
    std::vector<Interval> pieces_;
};

struct DensityEstimate {
    double value = 0.0;
    std::vector<double> windows;     // T_j = log R_j
    std::vector<double> per_window;  // |s ∩ (0, T_j)| / T_j
    std::size_t tail_start = 0;      // first window counted in value
};

// Finite-window stand-in for the upper log density: the max of the per-window
// ratios over the last ceil(half) of the windows.
[[nodiscard]] DensityEstimate upper_log_density(const IntervalSet& s, const std::vector<double>& windows);

void write_intervals_csv(std::ostream& out, const IntervalSet& s);

}  // namespace fatoulab
