#pragma once

#include "fatoulab/baker.hpp"
#include "fatoulab/intervals.hpp"
#include "fatoulab/modulus.hpp"

#include <optional>
#include <vector>

namespace fatoulab {

struct OrderSample {
    double t = 0.0;
    double log_max = 0.0;
    double q = 0.0;  // log log M / t
    bool used = false;
};

struct GrowthEstimate {
    double lambda_hat = 0.0;
    double rho_hat = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t tail_start = 0;  // first usable sample in the tail third
    bool polynomial = false;     // exact polynomial: order 0 by definition
    std::vector<OrderSample> samples;
};

// q(t) over a uniform t-grid; lambda_hat / rho_hat are max / min over the last
// third of the usable samples (log M > 1). Throws RangeTooSmall under 8.
[[nodiscard]] GrowthEstimate estimate_order(const EntireFunction& f, const std::vector<double>& t_grid,
                                            const CircleSearch& search = {});

// Order from the coefficients alone: fits -log|a_j| / j against log j over the
// tail half. 0 for polynomials.
[[nodiscard]] double coefficient_order_oracle(const SparseSeries& f);

struct FabryVerdict {
    std::vector<double> ratios;  // j_k / k for k >= 1
    bool consistent = false;
    double threshold = 10.0;
};

[[nodiscard]] FabryVerdict fabry_gap_check(const SparseSeries& f, double threshold = 10.0);

struct ExceptionalCell {
    double a = 0.0, b = 0.0, mid = 0.0;
    double log_max = 0.0, log_min = 0.0;
    bool excluded = false;  // log M <= 0
    bool marked = false;
};

struct ExceptionalSet {
    IntervalSet set;
    std::vector<ExceptionalCell> cells;
};

// Cells [t_i, t_{i+1}) marked when log m <= eps2 log M at the midpoint.
[[nodiscard]] ExceptionalSet exceptional_set(const EntireFunction& f, double eps2, const std::vector<double>& t_grid,
                                             const CircleSearch& search = {});

struct DeltaVerdict {
    bool consistent = false;
    double eps1 = 0.0;
    double eps2 = 0.0;
    ExceptionalSet exceptional;
    DensityEstimate density;
};

// Empty windows: every positive grid point in the upper half of the grid.
[[nodiscard]] DeltaVerdict delta_membership(const EntireFunction& f, double eps1, double eps2,
                                            const std::vector<double>& t_grid, std::vector<double> windows = {},
                                            const CircleSearch& search = {});

struct SpikeResult {
    bool found = false;
    double t = 0.0;
    double h = 0.0;
    double target = 0.0;   // h log M(t)
    double t_prime = 0.0;  // found point, or the best one tried
    double log_min = 0.0;  // log m at t_prime
    double margin = 0.0;   // log m(t') - target
};

[[nodiscard]] SpikeResult spike_finder(const EntireFunction& f, double t, double h, std::size_t coarse = 256,
                                       const CircleSearch& search = {});

struct ConvexityDefect {
    double t1 = 0.0, t2 = 0.0, t3 = 0.0;
    double defect = 0.0;  // chord(t2) - log M(t2)
};

[[nodiscard]] ConvexityDefect hadamard_convexity_check(const EntireFunction& f, double t1, double t2, double t3,
                                                       const CircleSearch& search = {});

struct ConvexitySweep {
    std::size_t triples = 0;
    ConvexityDefect worst;
};

// Every ordered triple of grid points, with log M computed once per point.
[[nodiscard]] ConvexitySweep hadamard_convexity_sweep(const EntireFunction& f, const std::vector<double>& t_grid,
                                                      const CircleSearch& search = {});

enum class GrowthMode { lower, upper };

struct GrowthConditionSample {
    double t = 0.0;
    double lhs = 0.0;  // log M(C1 r)
    double rhs = 0.0;  // C2 log M(r)
    bool holds = false;
};

struct GrowthConditionReport {
    GrowthMode mode = GrowthMode::lower;
    double c1 = 0.0, c2 = 0.0;
    std::vector<GrowthConditionSample> samples;
    double fraction = 0.0;
    std::optional<double> first_failure;
};

// lower: log M(C1 r) >= C2 log M(r). upper: log M(D1 r) < D2 log M(r), D1 > D2^2.
[[nodiscard]] GrowthConditionReport growth_condition_check(const EntireFunction& f, double c1, double c2,
                                                           const std::vector<double>& t_grid,
                                                           GrowthMode mode = GrowthMode::lower,
                                                           const CircleSearch& search = {});

struct HuaYangStep {
    std::size_t n = 0;
    double t_r = 0.0;       // log R_n
    double t_r_next = 0.0;  // log R_{n+1} = log M(R_n)
    double window_lo = 0.0, window_hi = 0.0;
    double t_t = 0.0;       // log t_n, where log m peaks in the window
    double log_min = 0.0;
    double bound = 0.0;     // (2 + 1/(n+1)) log R_{n+1}
    double margin = 0.0;
    bool pass = false;
};

struct HuaYangResult {
    std::vector<HuaYangStep> steps;
    bool range_exhausted = false;
};

[[nodiscard]] HuaYangResult hua_yang_sequence(const EntireFunction& f, double t_r1, std::size_t count,
                                              std::size_t coarse = 64, const CircleSearch& search = {});

struct CrossingVerdict {
    bool hypotheses_verified = false;
    bool pass = false;
    std::optional<AnnulusBracket> counterexample;
    std::size_t index = 0;  // n of the spanned pair when a counterexample exists
};

// No bracket may reach from |z| = R_n out to |z| = R_{n+1}^b, b > sup c(n) = 3.
[[nodiscard]] CrossingVerdict lemma1_crossing_check(const HuaYangResult& sequence,
                                                    const std::vector<AnnulusBracket>& brackets, double b);

struct OrderGapStep {
    std::size_t n = 0;
    double t_r = 0.0;
    double lhs = 0.0;  // log M(R_n^A)
    double rhs = 0.0;  // B log M(R_n)
    double margin = 0.0;
    bool pass = false;
};

struct OrderGapResult {
    std::vector<OrderGapStep> steps;
    bool range_exhausted = false;
};

// Throws PreconditionViolated unless rho_hat > 0, A > lambda_hat / rho_hat and B > 1.
[[nodiscard]] OrderGapResult order_gap_sequence(const EntireFunction& f, const GrowthEstimate& order, double a,
                                                double b, double t_r, std::size_t count,
                                                const CircleSearch& search = {});

}  // namespace fatoulab
