#include "fatoulab/real.hpp"

#include <mpfr.h>

#include <stdexcept>

namespace fatoulab {

namespace {

// Boost 1.74 stores the default precision in decimal digits and converts with
// digits10_2_2; pick the smallest digit count that yields the requested bits.
unsigned digits_for_bits(unsigned bits) {
    unsigned d = 1;
    while (boost::multiprecision::detail::digits10_2_2(d) < bits) ++d;
    return d;
}

// Boost's own default is 50 decimal digits; start from ours instead.
[[maybe_unused]] const bool precision_initialised = (Real::default_precision(digits_for_bits(default_precision_bits)), true);

}  // namespace

void set_precision_bits(unsigned bits) {
    if (bits < 53 || bits > 1u << 16)
        throw std::invalid_argument("precision bits must lie in [53, 65536]");
    Real::default_precision(digits_for_bits(bits));
}

unsigned precision_bits() {
    return static_cast<unsigned>(
        boost::multiprecision::detail::digits10_2_2(Real::default_precision()));
}

std::string to_text(const Real& x) {
    if (!isfinite(x)) return isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    // digits10 + 2 decimal digits round-trip for a binary mantissa of this size
    return x.str(static_cast<std::streamsize>(Real::default_precision()) + 2,
                 std::ios_base::scientific);
}

Real parse_real(const std::string& text) {
    try {
        return Real(text);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: " + text);
    }
}

Real real_pi() {
    static thread_local unsigned cached_bits = 0;
    static thread_local Real cached;
    if (cached_bits != precision_bits()) {
        cached = Real();
        mpfr_const_pi(cached.backend().data(), MPFR_RNDN);
        cached_bits = precision_bits();
    }
    return cached;
}

Real real_log2() {
    static thread_local unsigned cached_bits = 0;
    static thread_local Real cached;
    if (cached_bits != precision_bits()) {
        cached = Real();
        mpfr_const_log2(cached.backend().data(), MPFR_RNDN);
        cached_bits = precision_bits();
    }
    return cached;
}

Real softplus(const Real& x) {
    if (x > 0) return x + log1p(exp(-x));
    return log1p(exp(x));
}

Real log_add_exp(const Real& a, const Real& b) {
    if (isinf(a) && a < 0) return b;
    if (isinf(b) && b < 0) return a;
    return a > b ? a + log1p(exp(b - a)) : b + log1p(exp(a - b));
}

}  // namespace fatoulab
