#include "circle.hpp"

#include "fatoulab/error.hpp"
#include "function_data.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>

namespace fatoulab::detail {

namespace {

mpfr_ptr raw(Real& x) { return x.backend().data(); }
mpfr_srcptr raw(const Real& x) { return x.backend().data(); }

constexpr double eps = 0x1p-52;
const double zero_gap = 40.0 * std::log(10.0);

// Relative size of a perturbation of z that a double input (t, theta) cannot
// resolve; values of |f| below this times |z f'| are zeros for our purposes.
double input_resolution(double t, double theta) {
    return 4.0 * eps * (std::abs(t) + std::abs(theta) + 1.0);
}

double cutoff_nats() { return precision_bits() * std::log(2.0) + 40.0; }

}  // namespace

ExactCircle::ExactCircle(const EntireFunction& f, double t) : t_(t), tolerance_(f.tolerance()) {
    series_ = f.is_series();
    if (t > f.certified_t_max()) {
        out_of_range_ = true;
        return;
    }
    if (series_) {
        const auto& d = f.series().data();
        if (t == neg_inf) {
            at_origin_ = true;
            if (d.terms.front().exponent == 0) {
                origin_.log_abs = LogMagnitude::of(to_double(d.terms.front().log_abs));
                origin_.arg = d.terms.front().arg;
            } else {
                origin_.log_abs = LogMagnitude::zero_marker();
                origin_.status = EvalStatus::zero_hit;
            }
            return;
        }
        const Real T(t);
        std::vector<Real> L(d.terms.size());
        Real top = d.terms.front().log_abs + Real(d.terms.front().exponent) * T;
        for (std::size_t k = 0; k < d.terms.size(); ++k) {
            L[k] = d.terms[k].log_abs + Real(d.terms[k].exponent) * T;
            if (L[k] > top) top = L[k];
        }
        log_scale_ = top;
        const double cut = cutoff_nats();
        double wsum = 0.0;
        for (std::size_t k = 0; k < d.terms.size(); ++k) {
            Real rel = L[k] - top;
            if (rel < -cut) continue;
            Term term{exp(rel), d.terms[k].exponent, 0, d.unit_re[k], d.unit_im[k]};
            if (d.unit_im[k] == 0) term.unit = d.unit_re[k] > 0 ? 1 : -1;
            const double w = to_double(term.weight);
            wsum += w;
            max_exponent_ = std::max(max_exponent_, term.exponent);
            terms_.push_back(std::move(term));
        }
        weight_sum_ = wsum;
        reference_ = to_double(top) + std::log(wsum);
        tail_rel_log_ = f.series().tail_log_bound(t) - to_double(top);
        return;
    }

    const auto& b = f.baker();
    const auto& d = b.data();
    std::size_t n = 0;
    try {
        n = truncation_index(b, t);
    } catch (const Error&) {
        out_of_range_ = true;
        return;
    }
    constant_ = d.log_c;
    far_exponent_ = 0;
    if (t == neg_inf) {
        at_origin_ = true;
        for (std::size_t i = 0; i < n; ++i)
            if (d.factors[i].exponent == 0) constant_ += real_log2();
        origin_.log_abs = LogMagnitude::of(to_double(constant_));
        return;
    }
    const Real T(t);
    const double cut = cutoff_nats();
    Real reference = d.log_c;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t k = d.factors[i].exponent;
        if (k == 0) {
            constant_ += real_log2();
            reference += real_log2();
            continue;
        }
        Real u = Real(k) * (T - d.factors[i].log_radius);
        reference += softplus(u);
        if (abs(u) > cut) {
            if (u > 0) {
                constant_ += u;
                far_exponent_ += Real(k);
            }
            continue;
        }
        Factor fac;
        fac.e = exp(-abs(u));
        fac.em1 = expm1(-abs(u));
        fac.positive = u > 0;
        fac.u = std::move(u);
        fac.exponent = k;
        near_.push_back(std::move(fac));
    }
    reference_ = to_double(reference);
}

Evaluation ExactCircle::at(const Real& theta) const {
    if (out_of_range_) {
        Evaluation e;
        e.status = EvalStatus::out_of_range;
        return e;
    }
    if (at_origin_) return origin_;
    return series_ ? series_at(theta) : baker_at(theta);
}

Evaluation ExactCircle::finish(const Real& log_value, const Real& arg, std::complex<double> dlog, bool zero,
                               bool exhausted) const {
    Evaluation e;
    const double v = to_double(log_value);
    if (zero || v < reference_ - zero_gap) {
        e.log_abs = LogMagnitude::zero_marker();
        e.status = EvalStatus::zero_hit;
        return e;
    }
    e.log_abs = LogMagnitude::of(v);
    Real a = remainder(arg, 2 * real_pi());
    e.arg = to_double(a);
    e.log_derivative = std::abs(dlog);
    e.status = exhausted ? EvalStatus::precision_exhausted : EvalStatus::ok;
    return e;
}

Evaluation ExactCircle::series_at(const Real& theta) const {
    Real c, s, rr(1), ri(0), t1, t2, t3, re(0), im(0), dre(0), dim(0), tr, ti, ang;
    mpfr_sin_cos(raw(s), raw(c), raw(theta), MPFR_RNDN);
    std::uint64_t jprev = 0;
    for (const auto& term : terms_) {
        const std::uint64_t gap = term.exponent - jprev;
        if (gap <= 16) {
            for (std::uint64_t g = 0; g < gap; ++g) {
                mpfr_mul(raw(t1), raw(rr), raw(c), MPFR_RNDN);
                mpfr_mul(raw(t2), raw(ri), raw(s), MPFR_RNDN);
                mpfr_mul(raw(t3), raw(rr), raw(s), MPFR_RNDN);
                mpfr_mul(raw(ri), raw(ri), raw(c), MPFR_RNDN);
                mpfr_add(raw(ri), raw(ri), raw(t3), MPFR_RNDN);
                mpfr_sub(raw(rr), raw(t1), raw(t2), MPFR_RNDN);
            }
        } else {
            mpfr_mul_ui(raw(ang), raw(theta), term.exponent, MPFR_RNDN);
            mpfr_sin_cos(raw(ri), raw(rr), raw(ang), MPFR_RNDN);
        }
        jprev = term.exponent;
        if (term.unit != 0) {
            mpfr_mul(raw(tr), raw(term.weight), raw(rr), MPFR_RNDN);
            mpfr_mul(raw(ti), raw(term.weight), raw(ri), MPFR_RNDN);
            if (term.unit < 0) {
                mpfr_neg(raw(tr), raw(tr), MPFR_RNDN);
                mpfr_neg(raw(ti), raw(ti), MPFR_RNDN);
            }
        } else {
            mpfr_mul(raw(t1), raw(term.unit_re), raw(rr), MPFR_RNDN);
            mpfr_mul(raw(t2), raw(term.unit_im), raw(ri), MPFR_RNDN);
            mpfr_sub(raw(tr), raw(t1), raw(t2), MPFR_RNDN);
            mpfr_mul(raw(t1), raw(term.unit_re), raw(ri), MPFR_RNDN);
            mpfr_mul(raw(t2), raw(term.unit_im), raw(rr), MPFR_RNDN);
            mpfr_add(raw(ti), raw(t1), raw(t2), MPFR_RNDN);
            mpfr_mul(raw(tr), raw(tr), raw(term.weight), MPFR_RNDN);
            mpfr_mul(raw(ti), raw(ti), raw(term.weight), MPFR_RNDN);
        }
        mpfr_add(raw(re), raw(re), raw(tr), MPFR_RNDN);
        mpfr_add(raw(im), raw(im), raw(ti), MPFR_RNDN);
        if (term.exponent != 0) {
            mpfr_mul_ui(raw(tr), raw(tr), term.exponent, MPFR_RNDN);
            mpfr_mul_ui(raw(ti), raw(ti), term.exponent, MPFR_RNDN);
            mpfr_add(raw(dre), raw(dre), raw(tr), MPFR_RNDN);
            mpfr_add(raw(dim), raw(dim), raw(ti), MPFR_RNDN);
        }
    }
    Real modulus = hypot(re, im);
    const double th = to_double(theta);
    // a simple zero within the resolution of the double inputs: |f| <= delta |z f'|
    const double dabs = to_double(hypot(dre, dim));
    bool zero = modulus == 0 || to_double(modulus) <= input_resolution(t_, th) * dabs;
    if (zero) return finish(Real(0), Real(0), {}, true, false);
    const Real log_mod = log(modulus);
    const double lm = to_double(log_mod);
    // rotation recurrences drift by about one rounding per step of exponent
    const double drift = (static_cast<double>(max_exponent_) + static_cast<double>(terms_.size()) + 8.0) *
                         std::ldexp(1.0, -static_cast<int>(precision_bits()));
    const double log_err = std::log(drift) + std::log(weight_sum_) - lm;
    bool exhausted = log_err > std::log(tolerance_) || tail_rel_log_ - lm > std::log(tolerance_);
    const std::complex<double> z(to_double(re), to_double(im));
    const std::complex<double> dz(to_double(dre), to_double(dim));
    return finish(log_scale_ + log_mod, atan2(im, re), dz / z, false, exhausted);
}

Evaluation ExactCircle::baker_at(const Real& theta) const {
    Real value = constant_;
    Real arg = far_exponent_ * theta;
    std::complex<double> dlog(to_double(far_exponent_), 0.0);
    const double th = to_double(theta);
    const double delta = input_resolution(t_, th);
    bool exhausted = false;
    Real phi, half, sh, ch, bracket, sphi, cphi, y, x;
    for (const auto& fac : near_) {
        mpfr_mul_ui(raw(phi), raw(theta), fac.exponent, MPFR_RNDN);
        mpfr_div_2ui(raw(half), raw(phi), 1, MPFR_RNDN);
        mpfr_sin_cos(raw(sh), raw(ch), raw(half), MPFR_RNDN);
        // |1 + w|^2 e^{-2 max(u,0)} = expm1(-|u|)^2 + 4 e^{-|u|} cos^2(phi/2)
        bracket = fac.em1 * fac.em1 + 4 * fac.e * ch * ch;
        if (bracket == 0) return finish(Real(0), Real(0), {}, true, false);
        const double br = to_double(bracket);
        const double e = to_double(fac.e);
        // |1+w| / |w| against the resolution of w = (z/r)^k
        const double ratio = fac.positive ? std::sqrt(br) : std::sqrt(br) / e;
        if (ratio <= delta * static_cast<double>(fac.exponent))
            return finish(Real(0), Real(0), {}, true, false);
        value += (fac.positive ? fac.u : Real(0)) + log(bracket) / 2;
        sphi = 2 * sh * ch;
        cphi = ch * ch - sh * sh;
        if (fac.positive) {
            y = sphi;
            x = fac.e + cphi;
        } else {
            y = fac.e * sphi;
            x = 1 + fac.e * cphi;
        }
        arg += atan2(y, x);
        // w / (1 + w) in double, scaled so nothing overflows
        const double sp = to_double(sphi), cp = to_double(cphi);
        std::complex<double> ratio_w =
            fac.positive ? 1.0 / (1.0 + e * std::complex<double>(cp, -sp))
                         : e * std::complex<double>(cp, sp) / (1.0 + e * std::complex<double>(cp, sp));
        dlog += static_cast<double>(fac.exponent) * ratio_w;
        const double wmag = fac.positive ? 1.0 : e;  // |w| relative to e^{max(u,0)}
        const double phase = std::abs(to_double(phi)) + 1.0;
        const double rel = std::ldexp(1.0, -static_cast<int>(precision_bits())) * (1.0 + wmag * phase) /
                           std::sqrt(br);
        if (rel > tolerance_) exhausted = true;
    }
    return finish(value, arg, dlog, false, exhausted);
}

FastCircle::FastCircle(const EntireFunction& f, double t) : t_(t) {
    series_ = f.is_series();
    if (series_) {
        const auto& d = f.series().data();
        if (t == neg_inf) {
            at_origin_ = true;
            if (d.terms.front().exponent == 0) {
                origin_.log_abs = LogMagnitude::of(d.log_abs.front());
                origin_.arg = d.terms.front().arg;
            } else {
                origin_.log_abs = LogMagnitude::zero_marker();
                origin_.status = EvalStatus::zero_hit;
            }
            return;
        }
        double top = neg_inf;
        for (std::size_t k = 0; k < d.terms.size(); ++k)
            top = std::max(top, d.log_abs[k] + static_cast<double>(d.terms[k].exponent) * t);
        log_scale_ = top;
        std::uint64_t jlo = UINT64_MAX, jhi = 0;
        for (std::size_t k = 0; k < d.terms.size(); ++k) {
            const double rel = d.log_abs[k] + static_cast<double>(d.terms[k].exponent) * t - top;
            if (rel < -60.0) continue;
            const double w = std::exp(rel);
            terms_.push_back({w, d.terms[k].exponent, std::polar(1.0, d.terms[k].arg)});
            weight_sum_ += w;
            if (rel > -40.0) {
                jlo = std::min(jlo, d.terms[k].exponent);
                jhi = std::max(jhi, d.terms[k].exponent);
            }
        }
        frequency_ = jhi >= jlo ? jhi - jlo : 0;
        return;
    }
    const auto& d = f.baker().data();
    std::size_t n = d.factors.size();
    try {
        n = truncation_index(f.baker(), t);
    } catch (const Error&) {
        // beyond the certified range the scan is still useful as a sketch
    }
    constant_ = to_double(d.log_c);
    if (t == neg_inf) {
        at_origin_ = true;
        for (std::size_t i = 0; i < n; ++i)
            if (d.factors[i].exponent == 0) constant_ += std::log(2.0);
        origin_.log_abs = LogMagnitude::of(constant_);
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t k = d.factors[i].exponent;
        if (k == 0) {
            constant_ += std::log(2.0);
            continue;
        }
        const double u = static_cast<double>(k) * (t - d.log_radius[i]);
        if (std::abs(u) > 50.0) {
            if (u > 0) {
                constant_ += u;
                far_exponent_ += static_cast<double>(k);
            }
            continue;
        }
        Factor fac{u, std::exp(-std::abs(u)), std::expm1(-std::abs(u)), k, Real(0)};
        if (k > (std::uint64_t{1} << 20)) fac.exact_offset = Real(t) - d.factors[i].log_radius;
        if (std::abs(u) < 40.0) frequency_ = std::max(frequency_, k);
        near_.push_back(std::move(fac));
    }
}

Evaluation FastCircle::at(double theta) const {
    if (at_origin_) return origin_;
    Evaluation e;
    if (series_) {
        std::complex<double> sum(0.0), dsum(0.0);
        for (const auto& term : terms_) {
            const std::complex<double> v = term.weight * term.unit *
                                           std::polar(1.0, std::fmod(static_cast<double>(term.exponent) * theta,
                                                                     2.0 * M_PI));
            sum += v;
            dsum += static_cast<double>(term.exponent) * v;
        }
        const double m = std::abs(sum);
        if (m <= 64.0 * eps * weight_sum_ * static_cast<double>(terms_.size())) {
            e.log_abs = LogMagnitude::zero_marker();
            e.status = EvalStatus::zero_hit;
            return e;
        }
        e.log_abs = LogMagnitude::of(log_scale_ + std::log(m));
        e.arg = std::arg(sum);
        e.log_derivative = std::abs(dsum / sum);
        return e;
    }
    double value = constant_;
    double arg = std::fmod(far_exponent_ * theta, 2.0 * M_PI);
    std::complex<double> dlog(far_exponent_, 0.0);
    for (const auto& fac : near_) {
        double phi;
        if (fac.exponent > (std::uint64_t{1} << 20)) {
            Real p = Real(fac.exponent) * Real(theta);
            phi = to_double(remainder(p, 2 * real_pi()));
        } else {
            phi = std::fmod(static_cast<double>(fac.exponent) * theta, 2.0 * M_PI);
        }
        const double ch = std::cos(phi / 2.0);
        const double br = fac.em1 * fac.em1 + 4.0 * fac.e * ch * ch;
        if (br <= 0.0) {
            e.log_abs = LogMagnitude::zero_marker();
            e.status = EvalStatus::zero_hit;
            return e;
        }
        const bool pos = fac.u > 0;
        value += (pos ? fac.u : 0.0) + 0.5 * std::log(br);
        const double sp = std::sin(phi), cp = std::cos(phi);
        arg += pos ? std::atan2(sp, fac.e + cp) : std::atan2(fac.e * sp, 1.0 + fac.e * cp);
        const std::complex<double> w = pos ? 1.0 / (1.0 + fac.e * std::complex<double>(cp, -sp))
                                           : fac.e * std::complex<double>(cp, sp) /
                                                 (1.0 + fac.e * std::complex<double>(cp, sp));
        dlog += static_cast<double>(fac.exponent) * w;
    }
    e.log_abs = LogMagnitude::of(value);
    e.arg = std::remainder(arg, 2.0 * M_PI);
    e.log_derivative = std::abs(dlog);
    return e;
}

void FastCircle::scan(std::size_t n, std::vector<double>& values, std::vector<char>& noisy) const {
    values.assign(n, 0.0);
    noisy.assign(n, 0);
    if (at_origin_) {
        std::fill(values.begin(), values.end(), origin_.log_abs.as_double());
        return;
    }
    std::vector<double> cs(n), sn(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double a = grid_angle(m, n);
        cs[m] = std::cos(a);
        sn[m] = std::sin(a);
    }
    if (series_) {
        std::vector<double> re(n, 0.0), im(n, 0.0);
        for (const auto& term : terms_) {
            const std::uint64_t step = term.exponent % n;
            const double ur = term.weight * term.unit.real(), ui = term.weight * term.unit.imag();
            std::uint64_t idx = 0;
            for (std::size_t m = 0; m < n; ++m) {
                re[m] += ur * cs[idx] - ui * sn[idx];
                im[m] += ur * sn[idx] + ui * cs[idx];
                idx += step;
                if (idx >= n) idx -= n;
            }
        }
        const double floor = 1e4 * eps * weight_sum_ * static_cast<double>(terms_.size() + 1);
        for (std::size_t m = 0; m < n; ++m) {
            const double a = std::hypot(re[m], im[m]);
            noisy[m] = a < floor;
            values[m] = a > 0.0 ? log_scale_ + std::log(a) : neg_inf;
        }
        return;
    }
    std::fill(values.begin(), values.end(), constant_);
    for (const auto& fac : near_) {
        const std::uint64_t step = fac.exponent % n;
        const double scale = fac.em1 * fac.em1 + 4.0 * fac.e;
        const double base = fac.u > 0 ? fac.u : 0.0;
        std::uint64_t idx = 0;
        for (std::size_t m = 0; m < n; ++m) {
            // 4 cos^2(phi/2) = 2 (1 + cos phi)
            const double br = fac.em1 * fac.em1 + 2.0 * fac.e * (1.0 + cs[idx]);
            if (br < 1e5 * eps * scale) noisy[m] = 1;
            values[m] += base + 0.5 * std::log(std::max(br, 1e-300));
            idx += step;
            if (idx >= n) idx -= n;
        }
    }
}

}  // namespace fatoulab::detail
