#include "fatoulab/baker.hpp"

#include "fatoulab/error.hpp"

#include <algorithm>
#include <cmath>

namespace fatoulab {

const char* to_string(TableStatus s) {
    switch (s) {
        case TableStatus::complete: return "complete";
        case TableStatus::exponent_overflow: return "exponent_overflow";
        case TableStatus::log_radius_overflow: return "log_radius_overflow";
    }
    return "complete";
}

double RadiiTable::t(std::size_t n) const { return to_double(t_exact(n)); }

const Real& RadiiTable::t_exact(std::size_t n) const {
    if (n < 1 || n > log_radius.size())
        throw Error(Errc::not_enough_radii, "radius index " + std::to_string(n) + " not in table");
    return log_radius[n - 1];
}

std::uint64_t RadiiTable::k(std::size_t n) const {
    if (!has_exponent(n)) throw Error(Errc::not_enough_radii, "exponent index " + std::to_string(n) + " not in table");
    return exponent[n - 1];
}

std::optional<double> RadiiTable::lambda() const {
    if (const auto* r = std::get_if<LambdaRule>(&rule)) return r->lambda;
    return std::nullopt;
}

bool RadiiTable::odd_rule() const {
    const auto* r = std::get_if<LambdaRule>(&rule);
    return r && r->odd;
}

bool RadiiTable::valid_index(std::size_t n) const {
    return n0_detected && n > *n0_detected && n <= radii() && log_radius[n - 1] > 0;
}

namespace {

enum class Next { ok, overflow };

// floor(e^{lambda t}); a value within a few ulps of an integer is that integer,
// so e^{log 4} = 3.99...9 still gives 4.
Next lambda_exponent(const Real& t, const LambdaRule& rule, std::uint64_t cap, std::uint64_t& out) {
    const Real x = exp(Real(rule.lambda) * t);
    if (x > Real(cap) * 2) return Next::overflow;
    const Real nearest = round(x);
    const Real slack = ldexp(x, -static_cast<int>(precision_bits()) + 10);
    const Real k = abs(x - nearest) <= slack ? nearest : floor(x);
    std::uint64_t v = k.convert_to<std::uint64_t>();
    if (v > cap) return Next::overflow;
    if (rule.odd && v % 2 == 0) v = v == 0 ? 1 : v - 1;
    out = v;
    return Next::ok;
}

}  // namespace

std::optional<std::size_t> detect_n0(const std::vector<Real>& log_radius) {
    if (log_radius.size() < 2) return std::nullopt;
    const Real log2 = real_log2();
    std::optional<std::size_t> n0;
    for (std::size_t m = log_radius.size() - 1; m >= 1; --m) {
        if (!(log_radius[m] - log_radius[m - 1] > log2)) break;
        n0 = m;
    }
    return n0;
}

RadiiTable build_radii(const Real& c, const Real& r1, const ExponentRule& rule, std::size_t count,
                       std::uint64_t exponent_cap) {
    const Real c_max = 1 / (4 * exp(Real(2)));
    if (!(c > 0 && c < c_max))
        throw Error(Errc::parameter_violation, "C must lie in (0, 1/(4e^2)), got " + to_text(c));
    if (!(r1 > 2)) throw Error(Errc::parameter_violation, "r1 must exceed 2, got " + to_text(r1));
    if (count < 2) throw Error(Errc::parameter_violation, "need at least 2 radii");
    if (exponent_cap < 1) throw Error(Errc::parameter_violation, "exponent cap must be positive");
    if (const auto* lr = std::get_if<LambdaRule>(&rule)) {
        if (!(lr->lambda > 0.0) || !std::isfinite(lr->lambda))
            throw Error(Errc::parameter_violation, "lambda must be positive");
    } else {
        const auto& ks = std::get<ExplicitRule>(rule).exponents;
        if (ks.size() + 1 < count)
            throw Error(Errc::parameter_violation, "explicit rule needs at least N-1 exponents");
        for (auto k : ks)
            if (k > exponent_cap) throw Error(Errc::parameter_violation, "explicit exponent above the cap");
    }

    RadiiTable table;
    table.log_c = log(c);
    table.rule = rule;
    table.exponent_cap = exponent_cap;
    table.precision_bits = precision_bits();
    table.requested = count;
    table.log_radius.push_back(log(r1));

    const Real log2 = real_log2();
    const Real limit = ldexp(Real(1), static_cast<int>(precision_bits()) - 8);
    bool exponents_open = true;
    for (std::size_t n = 1;; ++n) {
        const Real& tn = table.log_radius[n - 1];
        if (exponents_open) {
            std::uint64_t k = 0;
            if (const auto* lr = std::get_if<LambdaRule>(&rule)) {
                if (lambda_exponent(tn, *lr, exponent_cap, k) == Next::overflow) {
                    exponents_open = false;
                    table.status = TableStatus::exponent_overflow;
                }
            } else {
                const auto& ks = std::get<ExplicitRule>(rule).exponents;
                if (n <= ks.size()) k = ks[n - 1];
                else exponents_open = false;
            }
            if (exponents_open) table.exponent.push_back(k);
        }
        if (n == count) break;
        if (table.exponent.size() + 1 < n) break;
        // the i = n factor is 1 + 1 whatever k_n is
        Real next = table.log_c + log2;
        for (std::size_t i = 1; i < n; ++i) {
            const std::uint64_t k = table.exponent[i - 1];
            next += k == 0 ? log2 : softplus(Real(k) * (tn - table.log_radius[i - 1]));
        }
        if (abs(next) > limit) {
            table.status = TableStatus::log_radius_overflow;
            break;
        }
        table.log_radius.push_back(std::move(next));
    }
    table.n0_detected = detect_n0(table.log_radius);
    return table;
}

BakerProduct baker_function(const RadiiTable& table, double tolerance) {
    if (table.radii() < 2) throw Error(Errc::not_enough_radii, "a product needs at least two radii");
    const std::size_t K = std::min(table.exponents(), table.radii() - 1);
    std::vector<BakerFactor> factors;
    factors.reserve(K);
    for (std::size_t i = 0; i < K; ++i) factors.push_back({table.log_radius[i], table.exponent[i]});
    return BakerProduct::truncated(table.log_c, std::move(factors), table.log_radius[K], tolerance);
}

AnnulusBracket a_annulus(double t_n, double t_next, std::size_t n) {
    return {2.0 * t_n, t_next / 2.0, BracketKind::a_annulus, n};
}

AnnulusBracket q_annulus(double t_n, double t_next, std::size_t n) {
    return {t_n / 2.0, 2.0 * t_next, BracketKind::q_annulus, n};
}

bool empty(const AnnulusBracket& b) { return !(b.t_inner < b.t_outer); }

AnnuliReport annuli(const RadiiTable& table) {
    AnnuliReport out;
    for (std::size_t n = 1; n < table.radii(); ++n) {
        if (!table.valid_index(n)) continue;
        const auto a = a_annulus(table.t(n), table.t(n + 1), n);
        if (empty(a)) {
            out.skipped.push_back(n);
            continue;
        }
        out.brackets.push_back(a);
        out.brackets.push_back(q_annulus(table.t(n), table.t(n + 1), n));
    }
    return out;
}

bool invariance_checkable(const RadiiTable& table, std::size_t n) {
    if (!table.valid_index(n) || n + 2 > table.radii()) return false;
    return !empty(a_annulus(table.t(n), table.t(n + 1))) && !empty(a_annulus(table.t(n + 1), table.t(n + 2)));
}

namespace {

double checked(const CircleExtremum& e, bool& exhausted) {
    if (e.status == CircleStatus::out_of_range)
        throw Error(Errc::not_enough_radii, "boundary circle beyond the certified range");
    if (e.status == CircleStatus::precision_exhausted) exhausted = true;
    return e.value.as_double();
}

}  // namespace

InvarianceVerdict verify_forward_invariance(const BakerProduct& f, const RadiiTable& table, std::size_t n) {
    if (!table.valid_index(n) || n + 1 > table.radii() || empty(a_annulus(table.t(n), table.t(n + 1))))
        throw Error(Errc::precondition, "A_" + std::to_string(n) + " is not a valid nonempty annulus");
    if (n + 2 > table.radii() || empty(a_annulus(table.t(n + 1), table.t(n + 2))))
        throw Error(Errc::not_enough_radii, "A_" + std::to_string(n + 1) + " unavailable");
    InvarianceVerdict v;
    v.n = n;
    const EntireFunction g(f);
    const auto a = a_annulus(table.t(n), table.t(n + 1));
    const double m_in = checked(min_modulus(g, a.t_inner), v.exhausted);
    const double m_out = checked(min_modulus(g, a.t_outer), v.exhausted);
    const double M_in = checked(max_modulus(g, a.t_inner), v.exhausted);
    const double M_out = checked(max_modulus(g, a.t_outer), v.exhausted);
    const auto next = a_annulus(table.t(n + 1), table.t(n + 2));
    v.inner_margin = std::min(m_in, m_out) - next.t_inner;
    v.outer_margin = next.t_outer - std::max(M_in, M_out);
    v.pass = v.inner_margin > 0.0 && v.outer_margin > 0.0 && !v.exhausted;
    return v;
}

MarkerVerdict verify_growth_markers(const BakerProduct& f, const RadiiTable& table, std::size_t n) {
    MarkerVerdict v;
    v.n = n;
    const std::uint64_t k = table.k(n);
    v.bound = static_cast<double>(k) * std::log(2.0);
    const double t = to_double(table.t_exact(n) + real_log2());
    const auto e = eval_log_modulus(EntireFunction(f), t, 0.0);
    if (e.status == EvalStatus::out_of_range)
        throw Error(Errc::not_enough_radii, "2 r_" + std::to_string(n) + " beyond the certified range");
    v.value = e.log_abs.as_double();
    v.slack = v.value - v.bound;
    v.pass = k == 0 || v.slack > 0.0;
    return v;
}

LogLogVerdict verify_loglog_ratio(const RadiiTable& table, std::size_t n, double lambda) {
    if (!table.n0_detected || n < *table.n0_detected + 2)
        throw Error(Errc::precondition, "index " + std::to_string(n) + " lies in the non-doubling prefix");
    if (n + 1 > table.radii()) throw Error(Errc::not_enough_radii, "t_{n+1} not in table");
    if (!(table.t_exact(n - 1) > 1)) throw Error(Errc::precondition, "t_{n-1} must exceed 1");
    LogLogVerdict v;
    v.n = n;
    v.value = to_double(log(table.t_exact(n + 1)) / table.t_exact(n - 1));
    v.bound = 2.0 * lambda + 1.0;
    v.pass = v.value < v.bound;
    return v;
}

GapDensityReport gap_density_bound(const RadiiTable& table, std::size_t samples_per_gap, double slack) {
    for (std::size_t n = 1; n <= table.exponents(); ++n)
        if (table.k(n) % 2 == 0)
            throw Error(Errc::even_exponent, "k_" + std::to_string(n) + " = " + std::to_string(table.k(n)) + " is even");
    std::vector<std::size_t> valid;
    for (std::size_t n = 1; n <= table.radii(); ++n)
        if (table.valid_index(n)) valid.push_back(n);
    if (valid.size() < 3) throw Error(Errc::not_enough_radii, "need three radii beyond the non-doubling prefix");

    GapDensityReport r;
    r.slack = slack;
    const double log4 = std::log(4.0);
    std::vector<double> windows;
    for (std::size_t n : valid) {
        r.gaps.add(table.t(n) - log4, table.t(n) + log4);
        if (table.has_exponent(n)) windows.push_back(table.t(n) + log4);
    }
    if (windows.empty()) throw Error(Errc::not_enough_radii, "no density window with a known exponent");
    r.density = upper_log_density(r.gaps, windows);
    r.density_pass = r.density.value <= r.bound + r.slack;

    const EntireFunction f(baker_function(table));
    for (std::size_t n : valid) {
        if (n + 1 > table.radii()) continue;
        const double lo = table.t(n) + log4;
        const double hi = std::min(table.t(n + 1) - log4, f.certified_t_max());
        if (!(hi > lo)) continue;
        for (std::size_t i = 1; i <= samples_per_gap; ++i) {
            const double t = lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(samples_per_gap + 1));
            const auto M = max_modulus(f, t);
            const auto m = min_modulus(f, t);
            QuotientCheck q{n, t, log4 + m.value.as_double() - M.value.as_double(), false};
            q.pass = q.margin > 0.0 && M.status == CircleStatus::ok && m.status == CircleStatus::ok;
            r.quotient_checks.push_back(q);
        }
    }
    r.quotient_pass = !r.quotient_checks.empty() &&
                      std::all_of(r.quotient_checks.begin(), r.quotient_checks.end(),
                                  [](const QuotientCheck& q) { return q.pass; });
    return r;
}

}  // namespace fatoulab
