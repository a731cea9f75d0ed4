#include "fatoulab/intervals.hpp"

#include "fatoulab/error.hpp"
#include "fatoulab/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fatoulab {

IntervalSet::IntervalSet(std::vector<Interval> pieces) {
    for (const auto& p : pieces) add(p.a, p.b);
}

void IntervalSet::add(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) throw Error(Errc::invalid_argument, "interval endpoints must be numbers");
    if (!(a < b)) return;
    // splice in, swallowing everything that touches [a, b)
    auto first = std::lower_bound(pieces_.begin(), pieces_.end(), a,
                                  [](const Interval& p, double x) { return p.b < x; });
    auto last = first;
    while (last != pieces_.end() && last->a <= b) {
        a = std::min(a, last->a);
        b = std::max(b, last->b);
        ++last;
    }
    first = pieces_.erase(first, last);
    pieces_.insert(first, {a, b});
}

bool IntervalSet::contains(double t) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t, [](double x, const Interval& p) { return x < p.b; });
    return it != pieces_.end() && it->a <= t;
}

double IntervalSet::measure(double lo, double hi) const {
    double total = 0.0;
    for (const auto& p : pieces_) {
        const double a = std::max(p.a, lo), b = std::min(p.b, hi);
        if (b > a) total += b - a;
    }
    return total;
}

DensityEstimate upper_log_density(const IntervalSet& s, const std::vector<double>& windows) {
    DensityEstimate d;
    for (std::size_t j = 0; j < windows.size(); ++j) {
        if (!(windows[j] > 0.0) || !std::isfinite(windows[j]))
            throw Error(Errc::invalid_argument, "density windows must be positive and finite");
        if (j > 0 && !(windows[j] > windows[j - 1]))
            throw Error(Errc::invalid_argument, "density windows must increase");
    }
    d.windows = windows;
    for (double T : windows) d.per_window.push_back(std::clamp(s.measure(0.0, T) / T, 0.0, 1.0));
    if (windows.empty()) return d;
    d.tail_start = windows.size() / 2;
    d.value = *std::max_element(d.per_window.begin() + static_cast<std::ptrdiff_t>(d.tail_start), d.per_window.end());
    return d;
}

void write_intervals_csv(std::ostream& out, const IntervalSet& s) {
    out << "t_a,t_b\n";
    for (const auto& p : s.intervals()) out << format_number(p.a) << ',' << format_number(p.b) << '\n';
}

}  // namespace fatoulab
