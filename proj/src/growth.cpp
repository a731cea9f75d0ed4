#include "fatoulab/growth.hpp"

#include "fatoulab/error.hpp"
#include "fatoulab/parallel.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace fatoulab {

namespace {

double checked_value(const CircleExtremum& e, double t) {
    if (e.status == CircleStatus::out_of_range)
        throw Error(Errc::precondition, "t = " + format_number(t) + " lies beyond the certified range");
    return e.value.as_double();
}

double log_max(const EntireFunction& f, double t, const CircleSearch& s) { return checked_value(max_modulus(f, t, s), t); }
// a minimum lost to cancellation is only known to sit below the resolvable level
double log_min(const EntireFunction& f, double t, const CircleSearch& s) {
    const auto e = min_modulus(f, t, s);
    if (e.status == CircleStatus::precision_exhausted) return neg_inf;
    return checked_value(e, t);
}

std::vector<double> log_max_on(const EntireFunction& f, const std::vector<double>& grid, const CircleSearch& s) {
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { out[i] = log_max(f, grid[i], s); });
    return out;
}

std::vector<double> log_min_on(const EntireFunction& f, const std::vector<double>& grid, const CircleSearch& s) {
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { out[i] = log_min(f, grid[i], s); });
    return out;
}

void check_grid(const std::vector<double>& grid, std::size_t min_points) {
    if (grid.size() < min_points)
        throw Error(Errc::invalid_argument, "grid needs at least " + std::to_string(min_points) + " points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw Error(Errc::invalid_argument, "grid points must be finite");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(Errc::invalid_argument, "grid must increase strictly");
    }
}

// maximise log m on [lo, hi]: coarse interior grid, then Brent around the best point
std::pair<double, double> peak_min_modulus(const EntireFunction& f, double lo, double hi, std::size_t coarse,
                                           const CircleSearch& s) {
    std::vector<double> grid(coarse);
    for (std::size_t i = 0; i < coarse; ++i)
        grid[i] = lo + (hi - lo) * (static_cast<double>(i + 1) / static_cast<double>(coarse + 1));
    const auto values = log_min_on(f, grid, s);
    std::size_t best = 0;
    for (std::size_t i = 1; i < coarse; ++i)
        if (values[i] > values[best]) best = i;
    const double step = (hi - lo) / static_cast<double>(coarse + 1);
    // stay strictly inside the open window
    const double pad = 1e-9 * (hi - lo);
    const double a = std::max(lo + pad, grid[best] - step), b = std::min(hi - pad, grid[best] + step);
    std::uintmax_t iters = 60;
    const auto r = boost::math::tools::brent_find_minima([&](double t) { return -log_min(f, t, s); }, a, b, 40, iters);
    if (-r.second > values[best]) return {r.first, -r.second};
    return {grid[best], values[best]};
}

}  // namespace

GrowthEstimate estimate_order(const EntireFunction& f, const std::vector<double>& t_grid, const CircleSearch& search) {
    check_grid(t_grid, 16);
    GrowthEstimate g;
    g.t_min = t_grid.front();
    g.t_max = t_grid.back();
    const auto values = log_max_on(f, t_grid, search);
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        OrderSample s{t_grid[i], values[i], 0.0, false};
        if (values[i] > 1.0 && t_grid[i] > 0.0) {
            s.q = std::log(values[i]) / t_grid[i];
            s.used = true;
            usable.push_back(i);
        }
        g.samples.push_back(s);
    }
    if (usable.size() < 8)
        throw Error(Errc::range_too_small, std::to_string(usable.size()) + " samples with log M > 1, need 8");
    const std::size_t tail = (usable.size() + 2) / 3;
    g.tail_start = usable[usable.size() - tail];
    g.lambda_hat = -INFINITY;
    g.rho_hat = INFINITY;
    for (std::size_t k = usable.size() - tail; k < usable.size(); ++k) {
        g.lambda_hat = std::max(g.lambda_hat, g.samples[usable[k]].q);
        g.rho_hat = std::min(g.rho_hat, g.samples[usable[k]].q);
    }
    if (f.exact_polynomial()) {
        g.polynomial = true;
        g.lambda_hat = g.rho_hat = 0.0;
    }
    return g;
}

double coefficient_order_oracle(const SparseSeries& f) {
    if (f.exact()) return 0.0;
    std::vector<std::pair<double, double>> pts;  // (j, -log|a_j|)
    for (const auto& term : f.terms())
        if (term.exponent >= 2) pts.emplace_back(static_cast<double>(term.exponent), -to_double(term.log_abs));
    if (pts.size() < 8) throw Error(Errc::precondition, "coefficient oracle needs 8 nonzero coefficients");
    const std::size_t tail = (pts.size() + 1) / 2;
    const std::size_t first = pts.size() - tail;
    // -log|a_j| / j = (1/lambda) log j + c0 + c1 log j / j + c2 / j + ...
    Eigen::MatrixXd X(tail, 4);
    Eigen::VectorXd y(tail);
    for (std::size_t r = 0; r < tail; ++r) {
        const auto [j, L] = pts[first + r];
        const double lj = std::log(j);
        X.row(static_cast<Eigen::Index>(r)) << lj, 1.0, lj / j, 1.0 / j;
        y(static_cast<Eigen::Index>(r)) = L / j;
    }
    const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
    return c(0) > 0.0 ? 1.0 / c(0) : INFINITY;
}

FabryVerdict fabry_gap_check(const SparseSeries& f, double threshold) {
    const auto& terms = f.terms();
    if (terms.size() < 8) throw Error(Errc::precondition, "Fabry check needs 8 terms");
    FabryVerdict v;
    v.threshold = threshold;
    for (std::size_t k = 1; k < terms.size(); ++k)
        v.ratios.push_back(static_cast<double>(terms[k].exponent) / static_cast<double>(k));
    const std::size_t from = v.ratios.size() / 2;
    bool increasing = true;
    for (std::size_t i = from + 1; i < v.ratios.size(); ++i) increasing = increasing && v.ratios[i] > v.ratios[i - 1];
    v.consistent = increasing && v.ratios.back() > threshold;
    return v;
}

ExceptionalSet exceptional_set(const EntireFunction& f, double eps2, const std::vector<double>& t_grid,
                               const CircleSearch& search) {
    if (!(eps2 > 0.0 && eps2 < 1.0)) throw Error(Errc::invalid_argument, "eps2 must lie in (0, 1)");
    check_grid(t_grid, 2);
    ExceptionalSet out;
    std::vector<double> mids(t_grid.size() - 1);
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) mids[i] = 0.5 * (t_grid[i] + t_grid[i + 1]);
    const auto M = log_max_on(f, mids, search);
    const auto m = log_min_on(f, mids, search);
    for (std::size_t i = 0; i < mids.size(); ++i) {
        ExceptionalCell c{t_grid[i], t_grid[i + 1], mids[i], M[i], m[i], M[i] <= 0.0, false};
        c.marked = !c.excluded && m[i] <= eps2 * M[i];
        if (c.marked) out.set.add(c.a, c.b);
        out.cells.push_back(c);
    }
    return out;
}

DeltaVerdict delta_membership(const EntireFunction& f, double eps1, double eps2, const std::vector<double>& t_grid,
                              std::vector<double> windows, const CircleSearch& search) {
    if (!(eps1 > 0.0 && eps1 < 1.0)) throw Error(Errc::invalid_argument, "eps1 must lie in (0, 1)");
    DeltaVerdict v;
    v.eps1 = eps1;
    v.eps2 = eps2;
    v.exceptional = exceptional_set(f, eps2, t_grid, search);
    if (windows.empty())
        for (std::size_t i = t_grid.size() / 2; i < t_grid.size(); ++i)
            if (t_grid[i] > 0.0) windows.push_back(t_grid[i]);
    if (windows.empty()) throw Error(Errc::invalid_argument, "no positive density window");
    v.density = upper_log_density(v.exceptional.set, windows);
    v.consistent = v.density.value <= eps1;
    return v;
}

SpikeResult spike_finder(const EntireFunction& f, double t, double h, std::size_t coarse, const CircleSearch& search) {
    if (!(h > 1.0)) throw Error(Errc::invalid_argument, "h must exceed 1");
    if (!(t > 0.0)) throw Error(Errc::invalid_argument, "spike search needs r > 1");
    if (coarse == 0) throw Error(Errc::invalid_argument, "spike search needs grid points");
    if (h * t > f.certified_t_max()) throw Error(Errc::precondition, "h t lies beyond the certified range");
    SpikeResult r;
    r.t = t;
    r.h = h;
    r.target = h * log_max(f, t, search);
    std::vector<double> grid(coarse);
    for (std::size_t i = 0; i < coarse; ++i)
        grid[i] = t + (h * t - t) * (static_cast<double>(i + 1) / static_cast<double>(coarse + 1));
    const auto m = log_min_on(f, grid, search);
    std::size_t best = 0;
    for (std::size_t i = 0; i < coarse; ++i) {
        if (m[i] > r.target) {
            r.found = true;
            r.t_prime = grid[i];
            r.log_min = m[i];
            r.margin = m[i] - r.target;
            return r;
        }
        if (m[i] > m[best]) best = i;
    }
    const auto [tp, value] = peak_min_modulus(f, std::max(t, grid[best] - (h * t - t) / static_cast<double>(coarse + 1)),
                                              std::min(h * t, grid[best] + (h * t - t) / static_cast<double>(coarse + 1)),
                                              8, search);
    r.t_prime = tp;
    r.log_min = value;
    r.margin = value - r.target;
    r.found = r.margin > 0.0;
    return r;
}

ConvexityDefect hadamard_convexity_check(const EntireFunction& f, double t1, double t2, double t3,
                                         const CircleSearch& search) {
    if (!(t1 < t2 && t2 < t3)) throw Error(Errc::precondition, "need t1 < t2 < t3");
    const double m1 = log_max(f, t1, search), m2 = log_max(f, t2, search), m3 = log_max(f, t3, search);
    if (!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0)) throw Error(Errc::precondition, "log M must be positive at all three radii");
    const double chord = m1 + (t2 - t1) / (t3 - t1) * (m3 - m1);
    return {t1, t2, t3, chord - m2};
}

ConvexitySweep hadamard_convexity_sweep(const EntireFunction& f, const std::vector<double>& t_grid,
                                        const CircleSearch& search) {
    check_grid(t_grid, 3);
    const auto M = log_max_on(f, t_grid, search);
    for (double v : M)
        if (!(v > 0.0)) throw Error(Errc::precondition, "log M must be positive on the whole grid");
    ConvexitySweep s;
    s.worst.defect = INFINITY;
    const std::size_t n = t_grid.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const double chord = M[i] + (t_grid[j] - t_grid[i]) / (t_grid[k] - t_grid[i]) * (M[k] - M[i]);
                const double d = chord - M[j];
                ++s.triples;
                if (d < s.worst.defect) s.worst = {t_grid[i], t_grid[j], t_grid[k], d};
            }
    return s;
}

GrowthConditionReport growth_condition_check(const EntireFunction& f, double c1, double c2,
                                             const std::vector<double>& t_grid, GrowthMode mode,
                                             const CircleSearch& search) {
    if (!(c1 > 1.0 && c2 > 1.0)) throw Error(Errc::invalid_argument, "growth constants must exceed 1");
    if (mode == GrowthMode::upper && !(c1 > c2 * c2)) throw Error(Errc::precondition, "need D1 > D2^2");
    check_grid(t_grid, 1);
    GrowthConditionReport r;
    r.mode = mode;
    r.c1 = c1;
    r.c2 = c2;
    std::vector<double> shifted(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) shifted[i] = t_grid[i] + std::log(c1);
    const auto base = log_max_on(f, t_grid, search);
    const auto far = log_max_on(f, shifted, search);
    std::size_t holding = 0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        GrowthConditionSample s{t_grid[i], far[i], c2 * base[i], false};
        s.holds = mode == GrowthMode::lower ? s.lhs >= s.rhs : s.lhs < s.rhs;
        if (s.holds) ++holding;
        else if (!r.first_failure) r.first_failure = s.t;
        r.samples.push_back(s);
    }
    r.fraction = static_cast<double>(holding) / static_cast<double>(t_grid.size());
    return r;
}

HuaYangResult hua_yang_sequence(const EntireFunction& f, double t_r1, std::size_t count, std::size_t coarse,
                                const CircleSearch& search) {
    if (!(t_r1 > 0.0)) throw Error(Errc::invalid_argument, "R_1 must exceed 1");
    HuaYangResult out;
    double t_r = t_r1;
    const double limit = f.certified_t_max();
    for (std::size_t n = 1; n <= count; ++n) {
        const double dn = static_cast<double>(n);
        HuaYangStep s;
        s.n = n;
        s.t_r = t_r;
        s.window_lo = (2.0 + 2.0 / (2.0 * dn + 1.0)) * t_r;
        s.window_hi = (2.0 + 1.0 / dn) * t_r;
        if (s.window_hi > limit) {
            out.range_exhausted = true;
            break;
        }
        s.t_r_next = log_max(f, t_r, search);
        const auto [tt, value] = peak_min_modulus(f, s.window_lo, s.window_hi, coarse, search);
        s.t_t = tt;
        s.log_min = value;
        s.bound = (2.0 + 1.0 / (dn + 1.0)) * s.t_r_next;
        s.margin = value - s.bound;
        s.pass = s.margin > 0.0;
        out.steps.push_back(s);
        t_r = s.t_r_next;
    }
    return out;
}

CrossingVerdict lemma1_crossing_check(const HuaYangResult& sequence, const std::vector<AnnulusBracket>& brackets,
                                      double b) {
    if (!(b > 3.0)) throw Error(Errc::precondition, "b must exceed sup c(n) = 3");
    CrossingVerdict v;
    v.hypotheses_verified = !sequence.steps.empty();
    for (const auto& s : sequence.steps) {
        const double c = 2.0 + 1.0 / static_cast<double>(s.n);
        v.hypotheses_verified = v.hypotheses_verified && s.pass && s.t_r < s.t_t && s.t_t < c * s.t_r;
    }
    if (!v.hypotheses_verified) return v;
    for (const auto& s : sequence.steps)
        for (const auto& br : brackets)
            if (br.t_inner <= s.t_r && br.t_outer >= b * s.t_r_next) {
                v.counterexample = br;
                v.index = s.n;
                return v;
            }
    v.pass = true;
    return v;
}

OrderGapResult order_gap_sequence(const EntireFunction& f, const GrowthEstimate& order, double a, double b,
                                  double t_r, std::size_t count, const CircleSearch& search) {
    if (!(order.rho_hat > 0.0)) throw Error(Errc::precondition, "rho_hat = 0: the order ratio is undefined");
    if (!(a > order.lambda_hat / order.rho_hat))
        throw Error(Errc::precondition, "A must exceed lambda_hat / rho_hat = " +
                                            format_number(order.lambda_hat / order.rho_hat));
    if (!(b > 1.0)) throw Error(Errc::precondition, "B must exceed 1");
    if (!(t_r > 0.0)) throw Error(Errc::invalid_argument, "R_1 must exceed 1");
    OrderGapResult out;
    for (std::size_t n = 1; n <= count; ++n) {
        if (a * t_r > f.certified_t_max()) {
            out.range_exhausted = true;
            break;
        }
        OrderGapStep s;
        s.n = n;
        s.t_r = t_r;
        const double base = log_max(f, t_r, search);
        s.lhs = log_max(f, a * t_r, search);
        s.rhs = b * base;
        s.margin = s.lhs - s.rhs;
        s.pass = s.margin > 0.0;
        out.steps.push_back(s);
        t_r = base;
    }
    return out;
}

}  // namespace fatoulab
