#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace fatoulab {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

inline constexpr unsigned default_precision_bits = 128;

// Process-wide working precision. Boost keeps this in a plain static, so set it
// once before worker threads exist.
void set_precision_bits(unsigned bits);
[[nodiscard]] unsigned precision_bits();

[[nodiscard]] inline double to_double(const Real& x) { return x.convert_to<double>(); }

// Shortest decimal that reads back to the same value at the current precision.
[[nodiscard]] std::string to_text(const Real& x);
[[nodiscard]] Real parse_real(const std::string& text);

[[nodiscard]] Real real_pi();
[[nodiscard]] Real real_log2();

// log(1 + e^x) without overflow.
[[nodiscard]] Real softplus(const Real& x);
[[nodiscard]] inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

[[nodiscard]] Real log_add_exp(const Real& a, const Real& b);
[[nodiscard]] inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

}  // namespace fatoulab
