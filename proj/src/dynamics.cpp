#include "fatoulab/dynamics.hpp"

#include "fatoulab/error.hpp"
#include "fatoulab/parallel.hpp"
#include "fatoulab/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>

namespace fatoulab {

namespace {


constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double negligible = 40.0;           // nats below the leading term
constexpr double angle_budget = 0x1p40;       // k |theta| beyond this loses the angle

double wrap(double a) {
    a = std::remainder(a, two_pi);
    return a <= -std::numbers::pi ? a + two_pi : a;
}

// k theta mod 2 pi, NaN when the double angle no longer carries it
double times_angle(double k, double theta) {
    if (theta == 0.0) return 0.0;
    if (std::isnan(theta) || k * std::abs(theta) > angle_budget) return std::nan("");
    return wrap(k * theta);
}

struct Step {
    double t = 0.0;
    double theta = 0.0;
    EvalStatus status = EvalStatus::ok;
};

Step dominant_series(const SparseSeries& s, double t, double theta) {
    const auto& terms = s.terms();
    double lead = neg_inf;
    for (const auto& term : terms) lead = std::max(lead, to_double(term.log_abs) + static_cast<double>(term.exponent) * t);
    std::complex<double> acc = 0.0;
    std::size_t close = 0;
    double single_angle = 0.0;
    for (const auto& term : terms) {
        const double v = to_double(term.log_abs) + static_cast<double>(term.exponent) * t;
        if (v < lead - negligible) continue;
        ++close;
        const double a = times_angle(static_cast<double>(term.exponent), theta);
        single_angle = std::isnan(a) ? a : wrap(term.arg + a);
        if (!std::isnan(single_angle)) acc += std::polar(std::exp(v - lead), single_angle);
        else acc = std::nan("");
    }
    if (close == 1) return {lead, single_angle, EvalStatus::ok};
    if (std::isnan(acc.real()) || std::abs(acc) < 1e-10) return {lead, std::nan(""), EvalStatus::precision_exhausted};
    return {lead + std::log(std::abs(acc)), std::arg(acc), EvalStatus::ok};
}

Step dominant_baker(const BakerProduct& b, double t, double theta) {
    Step out{to_double(b.log_c()), 0.0, EvalStatus::ok};
    for (const auto& factor : b.factors()) {
        const double k = static_cast<double>(factor.exponent);
        if (factor.exponent == 0) {
            out.t += std::numbers::ln2;
            continue;
        }
        const double u = k * (t - to_double(factor.log_radius));
        if (u < -negligible) continue;
        const double a = times_angle(k, theta);
        if (u > negligible) {
            out.t += u;
            out.theta = std::isnan(a) ? a : wrap(out.theta + a);
            continue;
        }
        if (std::isnan(a)) return {out.t, std::nan(""), EvalStatus::precision_exhausted};
        const std::complex<double> w = 1.0 + std::polar(std::exp(u), a);
        out.t += std::log(std::abs(w));
        out.theta = std::isnan(out.theta) ? out.theta : wrap(out.theta + std::arg(w));
    }
    return out;
}

Step step(const EntireFunction& f, double t, double theta, const EscapeParams& p) {
    if (t > f.certified_t_max()) return {t, theta, EvalStatus::out_of_range};
    if (t >= p.safe_t) return f.is_series() ? dominant_series(f.series(), t, theta) : dominant_baker(f.baker(), t, theta);
    if (std::isnan(theta)) return {t, theta, EvalStatus::precision_exhausted};
    const auto e = p.fast && t != neg_inf ? eval_log_modulus_fast(f, t, theta) : eval_log_modulus(f, t, theta);
    if (e.status == EvalStatus::zero_hit) return {neg_inf, 0.0, EvalStatus::ok};
    return {e.log_abs.as_double(), e.arg, e.status};
}

std::optional<std::size_t> annulus_index(const std::vector<AnnulusBracket>& annuli, double t) {
    for (const auto& a : annuli)
        if (a.kind == BracketKind::a_annulus && t >= a.t_inner && t <= a.t_outer) return a.n;
    return std::nullopt;
}

std::vector<AnnulusBracket> a_brackets(const RadiiTable& table) {
    std::vector<AnnulusBracket> out;
    for (const auto& b : annuli(table).brackets)
        if (b.kind == BracketKind::a_annulus) out.push_back(b);
    return out;
}

}  // namespace

std::string to_string(OrbitStatus s) {
    switch (s) {
        case OrbitStatus::escaped: return "escaped";
        case OrbitStatus::bounded_window: return "bounded-window";
        case OrbitStatus::undecided: return "undecided";
        case OrbitStatus::overflow: return "overflow";
    }
    return "?";
}

std::string to_string(ComponentKind k) {
    switch (k) {
        case ComponentKind::wandering_annulus: return "wandering-annulus";
        case ComponentKind::gap_component: return "gap-component";
        case ComponentKind::central: return "central";
    }
    return "?";
}

double default_escape_t(const EntireFunction& f, const RadiiTable* table) {
    const double limit = f.certified_t_max();
    if (table) {
        double t_n = neg_inf;
        for (std::size_t n = 1; n <= table->radii(); ++n)
            if (table->t(n) <= limit && table->t(n) > 0.0) t_n = std::max(t_n, table->t(n));
        if (t_n > 0.0) return 2.0 * t_n;
    }
    if (f.exact_polynomial()) return 20.0;
    return limit;
}

EscapeParams escape_params(const EntireFunction& f, const RadiiTable* table) {
    EscapeParams p;
    p.escape_t = default_escape_t(f, table);
    if (table) p.annuli = a_brackets(*table);
    return p;
}

std::optional<long> OrbitRecord::phase() const {
    for (std::size_t k = 0; k < annulus.size(); ++k)
        if (annulus[k]) return static_cast<long>(*annulus[k]) - static_cast<long>(k);
    return std::nullopt;
}

OrbitRecord iterate_log(const EntireFunction& f, double t0, double theta0, const EscapeParams& params) {
    if (std::isnan(t0) || !std::isfinite(theta0)) throw Error(Errc::invalid_argument, "orbit start must be a number");
    if (t0 > f.certified_t_max() && !(t0 > params.escape_t))
        throw Error(Errc::precondition, "orbit start beyond the certified range");
    OrbitRecord r;
    r.t0 = t0;
    r.theta0 = theta0;
    r.t.push_back(t0);
    r.theta.push_back(wrap(theta0));
    r.annulus.push_back(annulus_index(params.annuli, t0));
    if (t0 > params.escape_t) {
        r.status = OrbitStatus::escaped;
        r.escape_step = 0;
        return r;
    }
    for (std::size_t k = 0; k < params.max_steps; ++k) {
        const Step s = step(f, r.t.back(), r.theta.back(), params);
        if (s.status == EvalStatus::out_of_range) {
            r.status = OrbitStatus::undecided;
            return r;
        }
        if (s.status == EvalStatus::precision_exhausted) {
            r.precision_exhausted = true;
            r.status = OrbitStatus::undecided;
            return r;
        }
        r.t.push_back(s.t);
        r.theta.push_back(s.theta);
        r.annulus.push_back(annulus_index(params.annuli, s.t));
        if (std::isnan(s.t) || s.t == std::numeric_limits<double>::infinity()) {
            r.status = OrbitStatus::overflow;
            return r;
        }
        if (s.t > params.escape_t) {
            r.status = OrbitStatus::escaped;
            r.escape_step = k + 1;
            return r;
        }
    }
    r.status = OrbitStatus::bounded_window;
    return r;
}

std::vector<RaySample> classify_ray(const EntireFunction& f, double theta, const std::vector<double>& t_grid,
                                    const EscapeParams& params) {
    std::vector<RaySample> out(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) {
        const auto o = iterate_log(f, t_grid[i], theta, params);
        out[i] = {t_grid[i], o.status, o.escape_step, o.phase()};
    });
    return out;
}

ComponentEstimate component_from_bracket(double t_inner, double t_outer, ComponentKind kind, std::size_t n) {
    if (!(t_inner <= t_outer)) throw Error(Errc::invalid_argument, "bracket edges out of order");
    ComponentEstimate c;
    c.bracket = {t_inner, t_outer, BracketKind::component, n};
    c.kind = kind;
    c.n = n;
    c.bound_inner = c.seed_inner = t_inner;
    c.bound_outer = c.seed_outer = t_outer;
    c.log_b0 = log_add_exp(t_outer, 0.0) - log_add_exp(t_inner, 0.0);
    c.b0 = std::exp(c.log_b0);
    const double log3 = std::log(3.0), log30 = std::log(30.0);
    const double below = log_add_exp(t_inner, log3);
    c.b1 = log_add_exp(t_outer, log3) / below;
    c.b2 = std::log(log_add_exp(t_outer, log30)) / below;
    return c;
}

std::vector<ComponentEstimate> detect_components(const EntireFunction& f, const RadiiTable& table,
                                                 std::size_t refine_iters, std::size_t max_steps) {
    if (!table.n0_detected) throw Error(Errc::precondition, "table has no doubling index");
    for (std::size_t n = std::max<std::size_t>(*table.n0_detected, 1); n < table.radii(); ++n)
        if (!(table.t_exact(n + 1) - table.t_exact(n) > real_log2()))
            throw Error(Errc::precondition, "radii stop doubling at n = " + std::to_string(n));

    EscapeParams p = escape_params(f, &table);
    p.max_steps = max_steps;

    // escape signature: terminal status plus first-escape step
    using Signature = std::pair<OrbitStatus, std::optional<std::size_t>>;
    const auto signature = [&](double t) -> std::optional<Signature> {
        if (t > f.certified_t_max() && !(t > p.escape_t)) return std::nullopt;
        const auto o = iterate_log(f, t, 0.0, p);
        if (o.status == OrbitStatus::undecided || o.status == OrbitStatus::overflow) return std::nullopt;
        return Signature{o.status, o.escape_step};
    };
    std::vector<std::optional<Signature>> seed_signature;
    // returns the last point known to differ, or nullopt
    const auto refine = [&](double differ, double same, const std::optional<Signature>& seed) -> std::optional<double> {
        if (refine_iters == 0) return differ;
        if (!seed) return std::nullopt;
        const auto matches = [&](double t) -> std::optional<bool> {
            const auto s = signature(t);
            if (!s) return std::nullopt;
            return *s == *seed;
        };
        const auto at_bound = matches(differ);
        if (!at_bound) return std::nullopt;
        if (*at_bound) return differ;
        for (std::size_t i = 0; i < refine_iters; ++i) {
            const double mid = 0.5 * (differ + same);
            const auto m = matches(mid);
            if (!m) return std::nullopt;
            (*m ? same : differ) = mid;
        }
        return differ;
    };

    std::vector<ComponentEstimate> wandering;
    for (const auto& a : p.annuli) {
        const std::size_t n = a.n;
        if (n < 2 || n + 1 > table.radii()) continue;
        ComponentEstimate c;
        c.kind = ComponentKind::wandering_annulus;
        c.n = n;
        c.seed_inner = a.t_inner;
        c.seed_outer = a.t_outer;
        c.bound_inner = std::min(table.t(n - 1) / 2.0, a.t_inner);
        c.bound_outer = std::max(2.0 * table.t(n + 1), a.t_outer);
        wandering.push_back(c);
    }
    // the seed must carry one signature at its quartiles; its edges can sit on the escape threshold
    for (const auto& c : wandering) {
        const double w = c.seed_outer - c.seed_inner;
        const auto a = signature(c.seed_inner + 0.25 * w), b = signature(c.seed_inner + 0.5 * w),
                   d = signature(c.seed_inner + 0.75 * w);
        seed_signature.push_back(a && a == b && b == d ? a : std::nullopt);
    }
    parallel_for(wandering.size() * 2, [&](std::size_t job) {
        auto& c = wandering[job / 2];
        const auto& seed = seed_signature[job / 2];
        if (job % 2 == 0) {
            const auto e = refine(c.bound_inner, c.seed_inner, seed);
            c.bracket.t_inner = e.value_or(c.bound_inner);
            if (!e) c.inconclusive = true;
        } else {
            const auto e = refine(c.bound_outer, c.seed_outer, seed);
            c.bracket.t_outer = e.value_or(c.bound_outer);
            if (!e) c.inconclusive = true;
        }
    });

    std::vector<ComponentEstimate> out;
    // a central component exists when the origin stays bounded
    if (!wandering.empty()) {
        const auto origin = iterate_log(f, neg_inf, 0.0, p);
        if (origin.status == OrbitStatus::bounded_window) {
            const auto central = [&](double t) {
                return iterate_log(f, t, 0.0, p).status == OrbitStatus::bounded_window;
            };
            double same = std::min(-10.0, wandering.front().bound_inner - 1.0);
            double differ = wandering.front().bracket.t_inner;
            if (central(same)) {
                if (central(differ)) differ = wandering.front().seed_inner;
                for (std::size_t i = 0; i < refine_iters; ++i) {
                    const double mid = 0.5 * (same + differ);
                    (central(mid) ? same : differ) = mid;
                }
                auto c = component_from_bracket(neg_inf, differ, ComponentKind::central);
                c.seed_inner = c.bound_inner = neg_inf;
                c.seed_outer = same;
                out.push_back(c);
            }
        }
    }
    for (std::size_t i = 0; i < wandering.size(); ++i) {
        auto& w = wandering[i];
        auto filled = component_from_bracket(w.bracket.t_inner, w.bracket.t_outer, w.kind, w.n);
        filled.seed_inner = w.seed_inner;
        filled.seed_outer = w.seed_outer;
        filled.bound_inner = w.bound_inner;
        filled.bound_outer = w.bound_outer;
        filled.inconclusive = w.inconclusive;
        out.push_back(filled);
        if (i + 1 < wandering.size() && w.bracket.t_outer < wandering[i + 1].bracket.t_inner)
            out.push_back(component_from_bracket(w.bracket.t_outer, wandering[i + 1].bracket.t_inner,
                                                 ComponentKind::gap_component, w.n));
    }
    return out;
}

BRatios b_ratios(const std::vector<ComponentEstimate>& components) {
    if (components.empty()) throw Error(Errc::precondition, "b ratios need at least one component");
    BRatios r{-std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0};
    for (const auto& c : components) {
        r.log_b0 = std::max(r.log_b0, c.log_b0);
        r.b1 = std::max(r.b1, c.b1);
        r.b2 = std::max(r.b2, c.b2);
    }
    r.b0 = std::exp(r.log_b0);
    return r;
}

FailureWitness strong_uniform_failure_witness(const std::vector<ComponentEstimate>& components, double m_target) {
    if (!(m_target > 1.0)) throw Error(Errc::invalid_argument, "m must exceed 1");
    FailureWitness w;
    w.target = m_target / 5.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& c = components[i];
        if (!(c.bracket.t_outer > c.bracket.t_inner)) continue;  // a circle is not an open component
        if (c.b1 >= w.target) {
            w.found = true;
            w.position = i;
            w.n = c.n;
            w.contribution = c.b1;
            return w;
        }
        w.contribution = std::max(w.contribution, c.b1);
    }
    return w;
}

double hyperbolic_radial_bound(double t_a, double t_b, double t_boundary) {
    if (!(t_a <= t_b)) throw Error(Errc::invalid_argument, "need t_a <= t_b");
    if (t_boundary == std::numeric_limits<double>::infinity() || std::isnan(t_boundary))
        throw Error(Errc::invalid_argument, "boundary modulus must be finite");
    if (t_a == t_b) return 0.0;
    return 0.5 * (log_add_exp(t_b, t_boundary) - log_add_exp(t_a, t_boundary));
}

EscapeGrid render_escape_grid(const EntireFunction& f, const Region& region, std::size_t width, std::size_t height,
                              const EscapeParams& params) {
    if (width == 0 || height == 0) throw Error(Errc::invalid_argument, "resolution must be at least 1 x 1");
    if (!(region.a0 < region.a1 && region.b0 < region.b1)) throw Error(Errc::invalid_argument, "empty region");
    EscapeGrid g;
    g.region = region;
    g.width = width;
    g.height = height;
    const std::size_t cells = width * height;
    g.status.resize(cells);
    g.steps.resize(cells);
    g.t0.resize(cells);
    g.theta0.resize(cells);
    const double da = (region.a1 - region.a0) / static_cast<double>(width);
    const double db = (region.b1 - region.b0) / static_cast<double>(height);
    parallel_for(cells, [&](std::size_t idx) {
        const std::size_t i = idx % width, j = idx / width;
        const double a = region.a0 + (static_cast<double>(i) + 0.5) * da;
        const double b = region.b1 - (static_cast<double>(j) + 0.5) * db;
        double t = a, theta = b;
        if (!region.log_polar) {
            const double r = std::hypot(a, b);
            t = r == 0.0 ? neg_inf : std::log(r);
            theta = std::atan2(b, a);
        }
        g.t0[idx] = t;
        g.theta0[idx] = theta;
        if (t > f.certified_t_max() && !(t > params.escape_t)) {
            g.status[idx] = OrbitStatus::undecided;
            g.steps[idx] = -1;
            return;
        }
        const auto o = iterate_log(f, t, theta, params);
        g.status[idx] = o.status;
        g.steps[idx] = o.escape_step ? static_cast<int>(*o.escape_step) : -1;
    });
    return g;
}

void write_pgm(std::ostream& out, const EscapeGrid& grid) {
    out << "P2\n" << grid.width << ' ' << grid.height << "\n255\n";
    for (std::size_t j = 0; j < grid.height; ++j) {
        for (std::size_t i = 0; i < grid.width; ++i) {
            const auto s = grid.at(i, j);
            const int v = s == OrbitStatus::escaped ? 255 : s == OrbitStatus::bounded_window ? 0 : 128;
            out << (i ? " " : "") << v;
        }
        out << '\n';
    }
}

void write_escape_csv(std::ostream& out, const EscapeGrid& grid) {
    out << "i,j,t0,theta0,status,escape_step\n";
    for (std::size_t j = 0; j < grid.height; ++j)
        for (std::size_t i = 0; i < grid.width; ++i) {
            const std::size_t idx = j * grid.width + i;
            out << i << ',' << j << ',' << format_number(grid.t0[idx]) << ',' << format_number(grid.theta0[idx]) << ','
                << to_string(grid.status[idx]) << ',' << grid.steps[idx] << '\n';
        }
}

std::string components_json(const std::vector<ComponentEstimate>& components) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : components)
        arr.push_back({{"kind", to_string(c.kind)},
                       {"n", c.n},
                       {"t_inner", json_number(c.bracket.t_inner)},
                       {"t_outer", json_number(c.bracket.t_outer)},
                       {"seed", {json_number(c.seed_inner), json_number(c.seed_outer)}},
                       {"bound", {json_number(c.bound_inner), json_number(c.bound_outer)}},
                       {"log_b0", json_number(c.log_b0)},
                       {"b0", json_number(c.b0)},
                       {"b1", json_number(c.b1)},
                       {"b2", json_number(c.b2)},
                       {"inconclusive", c.inconclusive}});
    return arr.dump(2) + "\n";
}

}  // namespace fatoulab
