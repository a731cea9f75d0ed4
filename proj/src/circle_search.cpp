#include "circle.hpp"

#include "fatoulab/error.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace fatoulab {

using detail::ExactCircle;
using detail::FastCircle;

Evaluation eval_log_modulus(const EntireFunction& f, double t, double theta) {
    if (std::isnan(t) || !std::isfinite(theta)) throw Error(Errc::invalid_argument, "t and theta must be numbers");
    return ExactCircle(f, t).at(theta);
}

Evaluation eval_log_modulus_fast(const EntireFunction& f, double t, double theta) {
    if (std::isnan(t) || !std::isfinite(theta)) throw Error(Errc::invalid_argument, "t and theta must be numbers");
    if (t > f.certified_t_max()) {
        Evaluation e;
        e.status = EvalStatus::out_of_range;
        return e;
    }
    return FastCircle(f, t).at(theta);
}

namespace {

constexpr std::size_t max_noisy_probes = 128;

CircleStatus circle_status(EvalStatus s) {
    switch (s) {
        case EvalStatus::zero_hit: return CircleStatus::zero_on_circle;
        case EvalStatus::precision_exhausted: return CircleStatus::precision_exhausted;
        case EvalStatus::out_of_range: return CircleStatus::out_of_range;
        default: return CircleStatus::ok;
    }
}

// larger is better
double score(const Evaluation& e, bool want_max) {
    const double v = e.log_abs.as_double();
    return want_max ? v : -v;
}

struct Best {
    bool want_max;
    double theta = 0.0;
    Evaluation e;
    bool set = false;

    void offer(double th, const Evaluation& cand) {
        if (!set || score(cand, want_max) > score(e, want_max)) {
            theta = th;
            e = cand;
            set = true;
        }
    }
    [[nodiscard]] bool zero() const { return set && e.status == EvalStatus::zero_hit; }
};

CircleExtremum finish(const Best& best, std::size_t grid, bool capped) {
    CircleExtremum out;
    out.value = best.e.log_abs;
    out.theta = std::remainder(best.theta, 2.0 * M_PI);
    out.status = circle_status(best.e.status);
    out.grid_points = grid;
    out.grid_capped = capped;
    return out;
}

void refine(const ExactCircle& exact, double center, double h, int rounds, Best& best) {
    best.offer(center, exact.at(center));
    if (best.zero()) return;
    for (int r = 0; r < rounds; ++r) {
        const double lo = center - h, hi = center + h;
        auto objective = [&](double th) {
            const Evaluation e = exact.at(th);
            best.offer(th, e);
            const double s = score(e, best.want_max);
            return std::isfinite(s) ? -s : (s > 0 ? -1e300 : 1e300);
        };
        std::uintmax_t iters = 80;
        const auto [x, fx] = boost::math::tools::brent_find_minima(objective, lo, hi, 45, iters);
        (void)fx;
        if (best.zero()) return;
        // minimum pinned to the bracket edge: the true extremum lies further out
        if (x - lo > 0.02 * h && hi - x > 0.02 * h) return;
        center = x;
    }
}

CircleExtremum search(const EntireFunction& f, double t, const CircleSearch& cs, bool want_max,
                      bool allow_shortcut) {
    if (std::isnan(t)) throw Error(Errc::invalid_argument, "t must be a number");
    if (cs.grid_points < 4 || cs.candidates == 0)
        throw Error(Errc::invalid_argument, "circle search needs at least 4 grid points and one candidate");
    const ExactCircle exact(f, t);
    if (exact.out_of_range()) {
        CircleExtremum out;
        out.value = LogMagnitude::of(std::numeric_limits<double>::quiet_NaN());
        out.status = CircleStatus::out_of_range;
        return out;
    }
    Best best{want_max, 0.0, {}, false};
    if (allow_shortcut && (want_max ? max_on_positive_axis(f) : min_on_negative_axis(f))) {
        const Evaluation e = want_max ? exact.at(Real(0)) : exact.at(real_pi());
        best.offer(want_max ? 0.0 : M_PI, e);
        auto out = finish(best, 0, false);
        out.shortcut = true;
        return out;
    }
    if (t == neg_inf) {
        best.offer(0.0, exact.at(0.0));
        return finish(best, 0, false);
    }

    const FastCircle fast(f, t);
    std::size_t n = cs.grid_points;
    const std::uint64_t freq = fast.frequency();
    if (freq > cs.max_grid_points / 8) n = cs.max_grid_points;
    else n = std::max<std::size_t>(n, 8 * freq);
    bool capped = false;
    if (n > cs.max_grid_points) {
        n = cs.max_grid_points;
        capped = true;
    } else if (8 * freq > cs.max_grid_points) {
        capped = true;
    }
    n += n % 2;

    std::vector<double> values;
    std::vector<char> noisy;
    fast.scan(n, values, noisy);

    std::vector<std::size_t> cand;
    for (std::size_t m = 0; m < n; ++m) {
        if (noisy[m]) continue;
        const double l = values[(m + n - 1) % n], r = values[(m + 1) % n], v = values[m];
        if (want_max ? (v >= l && v >= r) : (v <= l && v <= r)) cand.push_back(m);
    }
    auto better = [&](std::size_t a, std::size_t b) {
        const double va = want_max ? values[a] : -values[a];
        const double vb = want_max ? values[b] : -values[b];
        return va != vb ? va > vb : a < b;
    };
    if (cand.empty()) {
        std::size_t m0 = 0;
        for (std::size_t m = 1; m < n; ++m)
            if (!noisy[m] && (noisy[m0] || better(m, m0))) m0 = m;
        if (!noisy[m0]) cand.push_back(m0);
    }
    std::sort(cand.begin(), cand.end(), better);
    if (cand.size() > cs.candidates) cand.resize(cs.candidates);

    const double h = 2.0 * M_PI / static_cast<double>(n);
    if (!want_max) {
        // cancellation: the double scan cannot rank these, so ask the exact evaluator
        std::vector<std::size_t> bad;
        for (std::size_t m = 0; m < n; ++m)
            if (noisy[m]) bad.push_back(m);
        if (!bad.empty()) {
            const std::size_t stride = (bad.size() + max_noisy_probes - 1) / max_noisy_probes;
            Best noisy_best{false, 0.0, {}, false};
            std::size_t at = bad.front();
            for (std::size_t i = 0; i < bad.size(); i += stride) {
                const double th = detail::grid_angle(bad[i], n);
                const bool was = noisy_best.set;
                const double before = was ? score(noisy_best.e, false) : 0.0;
                noisy_best.offer(th, exact.at(th));
                if (!was || score(noisy_best.e, false) > before) at = bad[i];
                if (noisy_best.zero()) break;
            }
            best.offer(noisy_best.theta, noisy_best.e);
            if (best.zero()) return finish(best, n, capped);
            refine(exact, detail::grid_angle(at, n), h * static_cast<double>(stride), cs.refine_rounds, best);
            if (best.zero()) return finish(best, n, capped);
        }
    }
    for (std::size_t m : cand) {
        refine(exact, detail::grid_angle(m, n), h, cs.refine_rounds, best);
        if (best.zero()) break;
    }
    return finish(best, n, capped);
}

}  // namespace

CircleExtremum max_modulus(const EntireFunction& f, double t, const CircleSearch& search_opts) {
    return search(f, t, search_opts, true, true);
}

CircleExtremum min_modulus(const EntireFunction& f, double t, const CircleSearch& search_opts) {
    return search(f, t, search_opts, false, true);
}

CircleExtremum max_modulus_by_search(const EntireFunction& f, double t, const CircleSearch& search_opts) {
    return search(f, t, search_opts, true, false);
}

CircleExtremum min_modulus_by_search(const EntireFunction& f, double t, const CircleSearch& search_opts) {
    return search(f, t, search_opts, false, false);
}

}  // namespace fatoulab
