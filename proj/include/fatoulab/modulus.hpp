#pragma once

#include "fatoulab/real.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace fatoulab {

inline constexpr double default_truncation_tolerance = 1e-12;
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

struct LogMagnitude {
    double value = 0.0;
    bool zero = false;

    [[nodiscard]] static LogMagnitude of(double v) { return {v, false}; }
    [[nodiscard]] static LogMagnitude zero_marker() { return {neg_inf, true}; }
    [[nodiscard]] bool is_zero() const { return zero; }
    // -inf for the zero marker, so comparisons order it below everything
    [[nodiscard]] double as_double() const { return zero ? neg_inf : value; }
};

enum class EvalStatus { ok, zero_hit, precision_exhausted, out_of_range };

struct Evaluation {
    LogMagnitude log_abs;
    double arg = 0.0;             // arg f(z) in (-pi, pi]
    double log_derivative = 0.0;  // |z f'(z) / f(z)|
    EvalStatus status = EvalStatus::ok;
};

// One stored term a z^j with a kept as (log|a|, arg a).
struct SeriesTerm {
    Real log_abs;
    double arg = 0.0;
    std::uint64_t exponent = 0;
};

class SparseSeries {
public:
    // Exact polynomial: nothing is dropped, valid for every t.
    static SparseSeries polynomial(const std::vector<std::complex<double>>& coefficients,
                                   const std::vector<std::uint64_t>& exponents,
                                   double tolerance = default_truncation_tolerance);
    // Leading terms of an infinite series. Throws TruncationTooShort unless the
    // ratio test bounds the dropped tail by tolerance times the largest term for
    // every t <= t_max.
    static SparseSeries truncated(std::vector<SeriesTerm> terms, double t_max,
                                  double tolerance = default_truncation_tolerance);

    [[nodiscard]] const std::vector<SeriesTerm>& terms() const;
    [[nodiscard]] bool exact() const;
    [[nodiscard]] double certified_t_max() const;
    [[nodiscard]] double tolerance() const;
    [[nodiscard]] bool positive_coefficients() const;
    // log of the ratio-test bound on the dropped tail at t; -inf when exact
    [[nodiscard]] double tail_log_bound(double t) const;
    [[nodiscard]] SparseSeries with_tolerance(double tolerance) const;

    // Evaluation kernels only; Data is defined in the implementation.
    struct Data;
    explicit SparseSeries(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
    [[nodiscard]] const Data& data() const { return *data_; }

private:
    std::shared_ptr<const Data> data_;
};

// Σ z^n / n! and Σ z^n / (n!)^p. With terms == 0 the smallest certified count
// for t_max is chosen.
[[nodiscard]] SparseSeries exp_series(std::size_t terms, double t_max,
                                      double tolerance = default_truncation_tolerance);
[[nodiscard]] SparseSeries factorial_power_series(unsigned power, std::size_t terms, double t_max,
                                                  double tolerance = default_truncation_tolerance);

struct BakerFactor {
    Real log_radius;
    std::uint64_t exponent = 0;  // 0 is a constant factor 2
};

class BakerProduct {
public:
    // C * prod (1 + (z/r_i)^k_i) with nothing beyond the listed factors.
    static BakerProduct finite(Real log_c, std::vector<BakerFactor> factors,
                               double tolerance = default_truncation_tolerance);
    // Leading factors of an infinite product whose unstored radii start at
    // next_log_radius, at least double from there on, and carry exponents no
    // smaller than the last stored one.
    static BakerProduct truncated(Real log_c, std::vector<BakerFactor> factors, Real next_log_radius,
                                  double tolerance = default_truncation_tolerance);

    [[nodiscard]] const Real& log_c() const;
    [[nodiscard]] const std::vector<BakerFactor>& factors() const;
    [[nodiscard]] bool exact() const;
    [[nodiscard]] double tolerance() const;
    [[nodiscard]] double certified_t_max() const;
    [[nodiscard]] bool nonzero_exponents_odd() const;
    // log of the bound on sum_{unstored m} exp(k_m (t - t_m)); -inf when exact
    [[nodiscard]] double tail_log_bound(double t) const;
    [[nodiscard]] BakerProduct with_tolerance(double tolerance) const;

    struct Data;
    explicit BakerProduct(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
    [[nodiscard]] const Data& data() const { return *data_; }

private:
    std::shared_ptr<const Data> data_;
};

class EntireFunction {
public:
    EntireFunction(SparseSeries s) : rep_(std::move(s)) {}
    EntireFunction(BakerProduct b) : rep_(std::move(b)) {}

    [[nodiscard]] bool is_series() const { return std::holds_alternative<SparseSeries>(rep_); }
    [[nodiscard]] const SparseSeries& series() const { return std::get<SparseSeries>(rep_); }
    [[nodiscard]] const BakerProduct& baker() const { return std::get<BakerProduct>(rep_); }
    [[nodiscard]] double tolerance() const;
    [[nodiscard]] double certified_t_max() const;
    [[nodiscard]] bool exact_polynomial() const { return is_series() && series().exact(); }
    [[nodiscard]] EntireFunction with_tolerance(double tolerance) const;

private:
    std::variant<SparseSeries, BakerProduct> rep_;
};

// Every coefficient (or factor) positive real: |f| peaks on the positive axis.
[[nodiscard]] bool max_on_positive_axis(const EntireFunction& f);
// Baker product whose nonconstant factors all have odd exponent: each factor
// is smallest at arg z = pi.
[[nodiscard]] bool min_on_negative_axis(const EntireFunction& f);

// Extended-precision evaluation of log|f(e^{t + i theta})| and arg f. t may be
// -inf (z = 0).
[[nodiscard]] Evaluation eval_log_modulus(const EntireFunction& f, double t, double theta);
// Same formulas in double precision; used for rendering and coarse scans.
[[nodiscard]] Evaluation eval_log_modulus_fast(const EntireFunction& f, double t, double theta);

// Throws NotEnoughRadii when the unstored tail cannot be certified at t.
[[nodiscard]] std::size_t truncation_index(const BakerProduct& f, double t);

struct CircleSearch {
    std::size_t grid_points = 4096;
    std::size_t max_grid_points = std::size_t{1} << 20;
    int refine_rounds = 3;
    std::size_t candidates = 4;
};

enum class CircleStatus { ok, zero_on_circle, precision_exhausted, out_of_range };

struct CircleExtremum {
    LogMagnitude value;
    double theta = 0.0;
    CircleStatus status = CircleStatus::ok;
    bool shortcut = false;
    std::size_t grid_points = 0;
    bool grid_capped = false;
};

[[nodiscard]] CircleExtremum max_modulus(const EntireFunction& f, double t,
                                         const CircleSearch& search = {});
[[nodiscard]] CircleExtremum min_modulus(const EntireFunction& f, double t,
                                         const CircleSearch& search = {});
// Grid search even when an axis shortcut applies.
[[nodiscard]] CircleExtremum max_modulus_by_search(const EntireFunction& f, double t,
                                                   const CircleSearch& search = {});
[[nodiscard]] CircleExtremum min_modulus_by_search(const EntireFunction& f, double t,
                                                   const CircleSearch& search = {});

[[nodiscard]] SparseSeries compose_power(const SparseSeries& f, unsigned n);
[[nodiscard]] EntireFunction compose_power(const EntireFunction& f, unsigned n);

struct ModulusSample {
    double t = 0.0;
    LogMagnitude log_max;
    LogMagnitude log_min;
};

struct ModulusCurve {
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t count = 0;
    std::vector<ModulusSample> samples;
};

[[nodiscard]] std::vector<double> uniform_grid(double t_min, double t_max, std::size_t count);
[[nodiscard]] ModulusCurve sample_modulus_curve(const EntireFunction& f, double t_min, double t_max,
                                                std::size_t count, const CircleSearch& search = {});
void write_modulus_csv(std::ostream& out, const ModulusCurve& curve);

// 17 significant digits; "-inf"/"inf"/"nan" spelled out.
[[nodiscard]] std::string format_number(double x);

}  // namespace fatoulab
