#pragma once

#include "fatoulab/intervals.hpp"
#include "fatoulab/modulus.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fatoulab {

// k_n = floor(e^{lambda t_n}); with odd set, the largest odd integer not above
// that (at least 1).
struct LambdaRule {
    double lambda = 1.0;
    bool odd = false;
};

struct ExplicitRule {
    std::vector<std::uint64_t> exponents;
};

using ExponentRule = std::variant<LambdaRule, ExplicitRule>;

inline constexpr std::uint64_t default_exponent_cap = std::uint64_t{1} << 62;

enum class TableStatus { complete, exponent_overflow, log_radius_overflow };

[[nodiscard]] const char* to_string(TableStatus s);

// t_{n+1} depends on k_1..k_{n-1} only (the n-th factor is always 2 at z = r_n),
// so radii can run up to two entries past the last exponent. Those trailing
// radii are the frontier: usable as annulus edges, not as factors.
struct RadiiTable {
    Real log_c;
    std::vector<Real> log_radius;        // t_1, t_2, ...
    std::vector<std::uint64_t> exponent; // k_1, ..., never longer than log_radius
    std::optional<std::size_t> n0_detected;
    ExponentRule rule;
    std::uint64_t exponent_cap = default_exponent_cap;
    unsigned precision_bits = 0;
    std::size_t requested = 0;
    TableStatus status = TableStatus::complete;

    [[nodiscard]] std::size_t radii() const { return log_radius.size(); }
    [[nodiscard]] std::size_t exponents() const { return exponent.size(); }
    // 1-based accessors
    [[nodiscard]] double t(std::size_t n) const;
    [[nodiscard]] const Real& t_exact(std::size_t n) const;
    [[nodiscard]] std::uint64_t k(std::size_t n) const;
    [[nodiscard]] bool has_exponent(std::size_t n) const { return n >= 1 && n <= exponent.size(); }
    [[nodiscard]] std::optional<double> lambda() const;
    [[nodiscard]] bool odd_rule() const;
    // n > n0_detected and r_n > 1
    [[nodiscard]] bool valid_index(std::size_t n) const;
};

// 0 < C < 1/(4e^2), r1 > 2, count >= 2 radii.
[[nodiscard]] RadiiTable build_radii(const Real& c, const Real& r1, const ExponentRule& rule, std::size_t count,
                                     std::uint64_t exponent_cap = default_exponent_cap);

[[nodiscard]] std::optional<std::size_t> detect_n0(const std::vector<Real>& log_radius);

// C * prod (1 + (z/r_i)^{k_i}) over the stored exponents, the next radius
// bounding the tail.
[[nodiscard]] BakerProduct baker_function(const RadiiTable& table,
                                          double tolerance = default_truncation_tolerance);

enum class BracketKind { a_annulus, q_annulus, component };

struct AnnulusBracket {
    double t_inner = 0.0;
    double t_outer = 0.0;
    BracketKind kind = BracketKind::a_annulus;
    std::size_t n = 0;
};

struct AnnuliReport {
    std::vector<AnnulusBracket> brackets;  // A_n then Q_n for each emitted n
    std::vector<std::size_t> skipped;      // valid n whose A_n is empty
};

// A_n = [2 t_n, t_{n+1}/2], Q_n = [t_n/2, 2 t_{n+1}]
[[nodiscard]] AnnulusBracket a_annulus(double t_n, double t_next, std::size_t n = 0);
[[nodiscard]] AnnulusBracket q_annulus(double t_n, double t_next, std::size_t n = 0);
[[nodiscard]] bool empty(const AnnulusBracket& b);
[[nodiscard]] AnnuliReport annuli(const RadiiTable& table);

struct InvarianceVerdict {
    std::size_t n = 0;
    bool pass = false;
    double inner_margin = 0.0;  // min log m on the boundary minus 2 t_{n+1}
    double outer_margin = 0.0;  // t_{n+2}/2 minus max log M on the boundary
    bool exhausted = false;     // some boundary modulus hit the precision limit
};

struct MarkerVerdict {
    std::size_t n = 0;
    bool pass = false;
    double value = 0.0;  // log f(2 r_n)
    double bound = 0.0;  // k_n log 2
    double slack = 0.0;
};

struct LogLogVerdict {
    std::size_t n = 0;
    bool pass = false;
    double value = 0.0;  // log t_{n+1} / t_{n-1}
    double bound = 0.0;  // 2 lambda + 1
};

// Forward invariance is checkable at n when A_n and A_{n+1} are nonempty and
// t_{n+2} is known.
[[nodiscard]] bool invariance_checkable(const RadiiTable& table, std::size_t n);
[[nodiscard]] InvarianceVerdict verify_forward_invariance(const BakerProduct& f, const RadiiTable& table,
                                                          std::size_t n);
[[nodiscard]] MarkerVerdict verify_growth_markers(const BakerProduct& f, const RadiiTable& table, std::size_t n);
[[nodiscard]] LogLogVerdict verify_loglog_ratio(const RadiiTable& table, std::size_t n, double lambda);

struct QuotientCheck {
    std::size_t n = 0;
    double t = 0.0;
    double margin = 0.0;  // log 4 + log m - log M
    bool pass = false;
};

struct GapDensityReport {
    IntervalSet gaps;
    DensityEstimate density;
    double bound = 0.5;
    double slack = 0.1;
    bool density_pass = false;
    std::vector<QuotientCheck> quotient_checks;  // M < 4 m inside each E_n
    bool quotient_pass = false;
    [[nodiscard]] bool pass() const { return density_pass && quotient_pass; }
};

// Throws EvenExponent unless every stored k_n is odd.
[[nodiscard]] GapDensityReport gap_density_bound(const RadiiTable& table, std::size_t samples_per_gap = 16,
                                                 double slack = 0.1);

void write_table_csv(std::ostream& out, const RadiiTable& table);
[[nodiscard]] std::string table_sidecar_json(const RadiiTable& table);
[[nodiscard]] RadiiTable read_table(std::istream& csv, std::istream& sidecar);

}  // namespace fatoulab
