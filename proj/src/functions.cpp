#include "fatoulab/error.hpp"
#include "fatoulab/modulus.hpp"
#include "function_data.hpp"

#include <algorithm>
#include <cmath>

namespace fatoulab {

namespace {

void check_tolerance(double tol) {
    if (!(tol > 0.0 && tol < 1.0))
        throw Error(Errc::invalid_argument, "truncation tolerance must lie in (0, 1)");
}

double log_max_term(const std::vector<SeriesTerm>& terms, const std::vector<double>& log_abs, double t) {
    double best = neg_inf;
    for (std::size_t k = 0; k < terms.size(); ++k)
        best = std::max(best, log_abs[k] + static_cast<double>(terms[k].exponent) * t);
    return best;
}

double series_tail_log(const std::vector<SeriesTerm>& terms, const std::vector<double>& log_abs, double t) {
    const std::size_t L = terms.size() - 1;
    const double dj = static_cast<double>(terms[L].exponent - terms[L - 1].exponent);
    const double log_q = log_abs[L] - log_abs[L - 1] + dj * t;
    if (!(log_q < 0.0)) return pos_inf;
    return log_abs[L] + static_cast<double>(terms[L].exponent) * t + log_q - std::log1p(-std::exp(log_q));
}

bool series_certified(const std::vector<SeriesTerm>& terms, const std::vector<double>& log_abs,
                      double t_max, double tol) {
    if (terms.size() < 2) return false;
    return series_tail_log(terms, log_abs, t_max) - log_max_term(terms, log_abs, t_max) <= std::log(tol);
}

std::shared_ptr<SparseSeries::Data> series_data(std::vector<SeriesTerm> terms, bool exact, double t_max,
                                                double tol) {
    check_tolerance(tol);
    if (terms.empty()) throw Error(Errc::invalid_argument, "series needs at least one nonzero coefficient");
    for (std::size_t k = 1; k < terms.size(); ++k)
        if (terms[k].exponent <= terms[k - 1].exponent)
            throw Error(Errc::invalid_argument, "series exponents must be strictly increasing");
    auto d = std::make_shared<SparseSeries::Data>();
    d->positive = true;
    for (const auto& term : terms) {
        if (!isfinite(term.log_abs))
            throw Error(Errc::invalid_argument, "series coefficients must be finite and nonzero");
        d->log_abs.push_back(to_double(term.log_abs));
        const Real a(term.arg);
        d->unit_re.push_back(cos(a));
        d->unit_im.push_back(sin(a));
        if (std::remainder(term.arg, 2.0 * M_PI) != 0.0) d->positive = false;
    }
    d->terms = std::move(terms);
    d->exact = exact;
    d->t_max = exact ? pos_inf : t_max;
    d->tolerance = tol;
    return d;
}

std::vector<SeriesTerm> factorial_terms(unsigned power, std::size_t count) {
    std::vector<SeriesTerm> terms;
    terms.reserve(count);
    Real log_fact = 0;
    for (std::size_t n = 0; n < count; ++n) {
        if (n > 1) log_fact += log(Real(static_cast<double>(n)));
        terms.push_back({-Real(power) * log_fact, 0.0, n});
    }
    return terms;
}

SparseSeries factorial_family(unsigned power, std::size_t terms, double t_max, double tol) {
    if (power == 0) throw Error(Errc::invalid_argument, "factorial power must be positive");
    if (terms == 0) {
        // grow until the ratio test certifies t_max; the double image is enough to choose
        std::vector<SeriesTerm> probe;
        std::vector<double> log_abs;
        double log_fact = 0.0;
        for (std::size_t n = 0; n < 2000000; ++n) {
            if (n > 1) log_fact += std::log(static_cast<double>(n));
            probe.push_back({Real(0), 0.0, n});
            log_abs.push_back(-static_cast<double>(power) * log_fact);
            if (n >= 8 && series_tail_log(probe, log_abs, t_max) - log_max_term(probe, log_abs, t_max) <=
                              std::log(tol) - std::log(100.0))
                return SparseSeries::truncated(factorial_terms(power, n + 1), t_max, tol);
        }
        throw Error(Errc::truncation_too_short, "no certified truncation found");
    }
    return SparseSeries::truncated(factorial_terms(power, terms), t_max, tol);
}

}  // namespace

const std::vector<SeriesTerm>& SparseSeries::terms() const { return data_->terms; }
bool SparseSeries::exact() const { return data_->exact; }
double SparseSeries::certified_t_max() const { return data_->t_max; }
double SparseSeries::tolerance() const { return data_->tolerance; }
bool SparseSeries::positive_coefficients() const { return data_->positive; }

const Real& BakerProduct::log_c() const { return data_->log_c; }
const std::vector<BakerFactor>& BakerProduct::factors() const { return data_->factors; }
bool BakerProduct::exact() const { return !data_->next_log_radius.has_value(); }
double BakerProduct::tolerance() const { return data_->tolerance; }
double BakerProduct::certified_t_max() const { return data_->t_max; }
bool BakerProduct::nonzero_exponents_odd() const { return data_->nonzero_odd; }

SparseSeries SparseSeries::polynomial(const std::vector<std::complex<double>>& coefficients,
                                      const std::vector<std::uint64_t>& exponents, double tolerance) {
    if (coefficients.size() != exponents.size())
        throw Error(Errc::invalid_argument, "coefficient and exponent lists differ in length");
    std::vector<SeriesTerm> terms;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        if (coefficients[k] == std::complex<double>(0.0, 0.0)) continue;
        terms.push_back({log(Real(std::abs(coefficients[k]))), std::arg(coefficients[k]), exponents[k]});
    }
    return SparseSeries(series_data(std::move(terms), true, pos_inf, tolerance));
}

SparseSeries SparseSeries::truncated(std::vector<SeriesTerm> terms, double t_max, double tolerance) {
    if (!std::isfinite(t_max)) throw Error(Errc::invalid_argument, "t_max must be finite");
    auto d = series_data(std::move(terms), false, t_max, tolerance);
    if (!series_certified(d->terms, d->log_abs, t_max, tolerance))
        throw Error(Errc::truncation_too_short,
                    "ratio test cannot bound the dropped tail at t = " + format_number(t_max));
    return SparseSeries(std::move(d));
}

double SparseSeries::tail_log_bound(double t) const {
    if (data_->exact) return neg_inf;
    return series_tail_log(data_->terms, data_->log_abs, t);
}

SparseSeries SparseSeries::with_tolerance(double tolerance) const {
    if (data_->exact) {
        auto d = std::make_shared<Data>(*data_);
        check_tolerance(tolerance);
        d->tolerance = tolerance;
        return SparseSeries(std::move(d));
    }
    return truncated(data_->terms, data_->t_max, tolerance);
}

SparseSeries exp_series(std::size_t terms, double t_max, double tolerance) {
    return factorial_family(1, terms, t_max, tolerance);
}

SparseSeries factorial_power_series(unsigned power, std::size_t terms, double t_max, double tolerance) {
    return factorial_family(power, terms, t_max, tolerance);
}

namespace {

std::shared_ptr<BakerProduct::Data> baker_data(Real log_c, std::vector<BakerFactor> factors,
                                               std::optional<Real> next, double tol) {
    check_tolerance(tol);
    if (!isfinite(log_c)) throw Error(Errc::invalid_argument, "C must be positive and finite");
    auto d = std::make_shared<BakerProduct::Data>();
    d->nonzero_odd = true;
    for (const auto& fac : factors) {
        if (!isfinite(fac.log_radius)) throw Error(Errc::invalid_argument, "log-radii must be finite");
        d->log_radius.push_back(to_double(fac.log_radius));
        if (fac.exponent != 0 && fac.exponent % 2 == 0) d->nonzero_odd = false;
    }
    d->log_c = std::move(log_c);
    d->factors = std::move(factors);
    d->tolerance = tol;
    if (next) {
        if (!isfinite(*next)) throw Error(Errc::invalid_argument, "next log-radius must be finite");
        d->next_log_radius = std::move(next);
        d->next = to_double(*d->next_log_radius);
        d->tail_exponent = d->factors.empty() ? 1 : std::max<std::uint64_t>(1, d->factors.back().exponent);
        const double k = static_cast<double>(d->tail_exponent);
        d->t_max = d->next + (std::log(tol) + std::log1p(-std::exp2(-k))) / k;
    } else {
        d->t_max = pos_inf;
    }
    return d;
}

}  // namespace

BakerProduct BakerProduct::finite(Real log_c, std::vector<BakerFactor> factors, double tolerance) {
    return BakerProduct(baker_data(std::move(log_c), std::move(factors), std::nullopt, tolerance));
}

BakerProduct BakerProduct::truncated(Real log_c, std::vector<BakerFactor> factors, Real next_log_radius,
                                     double tolerance) {
    return BakerProduct(
        baker_data(std::move(log_c), std::move(factors), std::move(next_log_radius), tolerance));
}

double BakerProduct::tail_log_bound(double t) const {
    if (!data_->next_log_radius) return neg_inf;
    if (t == neg_inf) return neg_inf;
    const double k = static_cast<double>(data_->tail_exponent);
    return k * (t - data_->next) - std::log1p(-std::exp2(-k));
}

BakerProduct BakerProduct::with_tolerance(double tolerance) const {
    return BakerProduct(baker_data(data_->log_c, data_->factors, data_->next_log_radius, tolerance));
}

double EntireFunction::tolerance() const {
    return is_series() ? series().tolerance() : baker().tolerance();
}

double EntireFunction::certified_t_max() const {
    return is_series() ? series().certified_t_max() : baker().certified_t_max();
}

EntireFunction EntireFunction::with_tolerance(double tolerance) const {
    if (is_series()) return EntireFunction(series().with_tolerance(tolerance));
    return EntireFunction(baker().with_tolerance(tolerance));
}

bool max_on_positive_axis(const EntireFunction& f) {
    if (f.is_series()) return f.series().positive_coefficients();
    return true;  // C > 0 and every factor 1 + (r/r_i)^k is positive on the axis
}

bool min_on_negative_axis(const EntireFunction& f) {
    return !f.is_series() && f.baker().nonzero_exponents_odd();
}

std::size_t truncation_index(const BakerProduct& f, double t) {
    const double log_tol = std::log(f.tolerance());
    double sum = f.tail_log_bound(t);
    if (sum > log_tol)
        throw Error(Errc::not_enough_radii,
                    "stored radii cannot certify the product tail at t = " + format_number(t));
    const auto& factors = f.factors();
    const auto& data = f.data();
    std::size_t n = factors.size();
    while (n > 0) {
        const std::uint64_t k = factors[n - 1].exponent;
        double term = 0.0;
        if (k != 0) term = t == neg_inf ? neg_inf : static_cast<double>(k) * (t - data.log_radius[n - 1]);
        const double next = log_add_exp(sum, term);
        if (next > log_tol) break;
        sum = next;
        --n;
    }
    return n;
}

SparseSeries compose_power(const SparseSeries& f, unsigned n) {
    if (n == 0) throw Error(Errc::invalid_argument, "compose_power needs n >= 1");
    if (n == 1) return f;
    std::vector<SeriesTerm> terms = f.terms();
    for (auto& term : terms) {
        if (term.exponent > std::numeric_limits<std::uint64_t>::max() / n)
            throw Error(Errc::invalid_argument, "exponent overflow in compose_power");
        term.exponent *= n;
    }
    // f(z^n) on |z| = e^t is f on |w| = e^{nt}: the certified range scales by 1/n
    auto d = series_data(std::move(terms), f.exact(), f.certified_t_max() / n, f.tolerance());
    return SparseSeries(std::move(d));
}

EntireFunction compose_power(const EntireFunction& f, unsigned n) {
    if (!f.is_series()) throw Error(Errc::invalid_argument, "compose_power is defined for series only");
    return EntireFunction(compose_power(f.series(), n));
}

}  // namespace fatoulab
