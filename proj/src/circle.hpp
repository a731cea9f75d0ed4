#pragma once

// Evaluators bound to one circle |z| = e^t. Everything that depends only on t
// (term weights, factor exponents u_i = k_i (t - t_i)) is computed once, so
// sweeping theta costs one pass over the significant terms.

#include "fatoulab/modulus.hpp"

#include <complex>
#include <vector>

namespace fatoulab::detail {

class ExactCircle {
public:
    ExactCircle(const EntireFunction& f, double t);

    [[nodiscard]] Evaluation at(const Real& theta) const;
    [[nodiscard]] Evaluation at(double theta) const { return at(Real(theta)); }
    [[nodiscard]] bool out_of_range() const { return out_of_range_; }

private:
    Evaluation series_at(const Real& theta) const;
    Evaluation baker_at(const Real& theta) const;
    Evaluation finish(const Real& log_value, const Real& arg, std::complex<double> dlog, bool zero,
                      bool exhausted) const;

    bool series_ = true;
    bool out_of_range_ = false;
    bool at_origin_ = false;
    double t_ = 0.0;
    double tolerance_ = default_truncation_tolerance;
    double reference_ = 0.0;  // log of sum |terms| (series) or of f(e^t) (product)

    // series
    struct Term {
        Real weight;  // |a_k| e^{j_k t} / max
        std::uint64_t exponent;
        int unit;  // +1, -1, or 0 for a general phase
        Real unit_re, unit_im;
    };
    std::vector<Term> terms_;
    Real log_scale_;
    double weight_sum_ = 0.0;
    double tail_rel_log_ = neg_inf;
    std::uint64_t max_exponent_ = 0;

    // product
    struct Factor {
        Real u, e, em1;  // k (t - t_i), exp(-|u|), expm1(-|u|)
        std::uint64_t exponent;
        bool positive;   // u > 0
    };
    std::vector<Factor> near_;
    Real constant_;      // log C + far factors + constant factors
    Real far_exponent_;  // sum of k over far factors with u > 0
    Evaluation origin_;
};

class FastCircle {
public:
    FastCircle(const EntireFunction& f, double t);

    [[nodiscard]] Evaluation at(double theta) const;
    // values[m] = log|f| at theta = 2 pi m / n (n even); noisy[m] marks points where
    // cancellation leaves no trustworthy digits in double precision.
    void scan(std::size_t n, std::vector<double>& values, std::vector<char>& noisy) const;
    // spread of angular frequencies among the significant terms or factors
    [[nodiscard]] std::uint64_t frequency() const { return frequency_; }

private:
    bool series_ = true;
    bool at_origin_ = false;
    double t_ = 0.0;
    std::uint64_t frequency_ = 0;

    struct Term {
        double weight;
        std::uint64_t exponent;
        std::complex<double> unit;
    };
    std::vector<Term> terms_;
    double log_scale_ = 0.0;
    double weight_sum_ = 0.0;

    struct Factor {
        double u, e, em1;
        std::uint64_t exponent;
        Real exact_offset;  // t - t_i at extended precision, for huge exponents
    };
    std::vector<Factor> near_;
    double constant_ = 0.0;
    double far_exponent_ = 0.0;
    Evaluation origin_;
};

// Grid angle theta_m = 2 pi m / n with theta_{n/2} exactly the double nearest pi.
[[nodiscard]] inline double grid_angle(std::size_t m, std::size_t n) {
    return M_PI * (static_cast<double>(2 * m) / static_cast<double>(n));
}

}  // namespace fatoulab::detail
