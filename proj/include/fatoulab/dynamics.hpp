#pragma once

#include "fatoulab/baker.hpp"
#include "fatoulab/modulus.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fatoulab {

enum class OrbitStatus { escaped, bounded_window, undecided, overflow };

[[nodiscard]] std::string to_string(OrbitStatus s);

struct EscapeParams {
    std::size_t max_steps = 16;
    double escape_t = 20.0;
    double safe_t = 500.0;  // above this, dominant-term steps
    bool fast = false;      // double-precision evaluation (rendering)
    std::vector<AnnulusBracket> annuli;  // A_n brackets for index bookkeeping
};

// 2 t_N for the largest t_N with 2 t_N inside the certified range; for series
// the certified range itself (20 for polynomials).
[[nodiscard]] double default_escape_t(const EntireFunction& f, const RadiiTable* table = nullptr);
[[nodiscard]] EscapeParams escape_params(const EntireFunction& f, const RadiiTable* table = nullptr);

struct OrbitRecord {
    double t0 = 0.0;
    double theta0 = 0.0;
    std::vector<double> t;      // t[0] = t0
    std::vector<double> theta;  // NaN once the angle is lost
    std::vector<std::optional<std::size_t>> annulus;
    OrbitStatus status = OrbitStatus::bounded_window;
    std::optional<std::size_t> escape_step;
    bool precision_exhausted = false;

    // n - k for the first step k whose point lies in A_n
    [[nodiscard]] std::optional<long> phase() const;
};

[[nodiscard]] OrbitRecord iterate_log(const EntireFunction& f, double t0, double theta0, const EscapeParams& params);

struct RaySample {
    double t = 0.0;
    OrbitStatus status = OrbitStatus::undecided;
    std::optional<std::size_t> escape_step;
    std::optional<long> phase;
};

[[nodiscard]] std::vector<RaySample> classify_ray(const EntireFunction& f, double theta,
                                                  const std::vector<double>& t_grid, const EscapeParams& params);

enum class ComponentKind { wandering_annulus, gap_component, central };

[[nodiscard]] std::string to_string(ComponentKind k);

struct ComponentEstimate {
    AnnulusBracket bracket;
    ComponentKind kind = ComponentKind::wandering_annulus;
    std::size_t n = 0;
    double seed_inner = 0.0, seed_outer = 0.0;    // A_n
    double bound_inner = 0.0, bound_outer = 0.0;  // t_{n-1}/2, 2 t_{n+1}
    double log_b0 = 0.0;
    double b0 = 1.0;  // inf once exp(log_b0) overflows
    double b1 = 1.0;
    double b2 = 1.0;
    bool inconclusive = false;  // an edge stayed at the outer bound
};

// Contributions from the bracket endpoints alone.
[[nodiscard]] ComponentEstimate component_from_bracket(double t_inner, double t_outer, ComponentKind kind,
                                                       std::size_t n = 0);

// Brackets along theta = 0, refined by bisection against the escape signature
// (status, first escape step) of the A_n seed.
[[nodiscard]] std::vector<ComponentEstimate> detect_components(const EntireFunction& f, const RadiiTable& table,
                                                               std::size_t refine_iters, std::size_t max_steps = 8);

struct BRatios {
    double log_b0 = 0.0;
    double b0 = 1.0;
    double b1 = 1.0;
    double b2 = 1.0;
};

[[nodiscard]] BRatios b_ratios(const std::vector<ComponentEstimate>& components);

struct FailureWitness {
    bool found = false;
    std::size_t position = 0;  // into the component list
    std::size_t n = 0;
    double contribution = 0.0;  // b1 of the witness, or the largest seen
    double target = 0.0;        // m / 5
};

[[nodiscard]] FailureWitness strong_uniform_failure_witness(const std::vector<ComponentEstimate>& components,
                                                            double m_target);

// 1/2 log((e^{t_b} + e^{t_bd}) / (e^{t_a} + e^{t_bd})); t_bd = -inf allowed.
[[nodiscard]] double hyperbolic_radial_bound(double t_a, double t_b, double t_boundary);

struct Region {
    bool log_polar = false;  // (t, theta) box instead of (x, y)
    double a0 = -2.0, a1 = 2.0;
    double b0 = -2.0, b1 = 2.0;
};

struct EscapeGrid {
    Region region;
    std::size_t width = 0, height = 0;
    std::vector<OrbitStatus> status;  // row-major, row 0 at b1
    std::vector<int> steps;           // escape step, -1 if none
    std::vector<double> t0, theta0;

    [[nodiscard]] OrbitStatus at(std::size_t i, std::size_t j) const { return status[j * width + i]; }
};

[[nodiscard]] EscapeGrid render_escape_grid(const EntireFunction& f, const Region& region, std::size_t width,
                                            std::size_t height, const EscapeParams& params);

void write_pgm(std::ostream& out, const EscapeGrid& grid);
void write_escape_csv(std::ostream& out, const EscapeGrid& grid);
[[nodiscard]] std::string components_json(const std::vector<ComponentEstimate>& components);

}  // namespace fatoulab
