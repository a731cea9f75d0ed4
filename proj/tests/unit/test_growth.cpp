#include <doctest.h>

#include "fatoulab/error.hpp"
#include "fatoulab/growth.hpp"

#include <cmath>
#include <random>

using namespace fatoulab;

namespace {

const EntireFunction& ez() {
    static const EntireFunction f = exp_series(0, 6.0);
    return f;
}

const EntireFunction& quarter() {
    static const EntireFunction f = factorial_power_series(4, 0, 16.0);
    return f;
}

SparseSeries monomial(std::uint64_t j) { return SparseSeries::polynomial({{1.0, 0.0}}, {j}); }

SparseSeries gap_series(const std::vector<std::uint64_t>& exps) {
    return SparseSeries::polynomial(std::vector<std::complex<double>>(exps.size(), {1.0, 0.0}), exps);
}

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::config;  // sentinel: nothing thrown
}

}  // namespace

TEST_CASE("order estimate") {
    const auto g = estimate_order(ez(), uniform_grid(0.5, 6.0, 40));
    CHECK(g.lambda_hat == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.rho_hat == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(!g.polynomial);
    CHECK(g.samples.size() == 40);

    const auto p = estimate_order(monomial(5), uniform_grid(1.0, 10.0, 20));
    CHECK(p.polynomial);
    CHECK(p.rho_hat == 0.0);

    CHECK(code_of([] { (void)estimate_order(ez(), uniform_grid(-3.0, -1.0, 20)); }) == Errc::range_too_small);
    CHECK_THROWS_AS((void)estimate_order(ez(), uniform_grid(0.5, 6.0, 8)), Error);
}

TEST_CASE("coefficient oracle") {
    CHECK(coefficient_order_oracle(factorial_power_series(2, 200, 8.0)) == doctest::Approx(0.5).epsilon(0.01));
    CHECK(coefficient_order_oracle(factorial_power_series(4, 200, 8.0)) == doctest::Approx(0.25).epsilon(0.01));
    CHECK(coefficient_order_oracle(exp_series(200, 3.0)) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(coefficient_order_oracle(monomial(3)) == 0.0);
}

TEST_CASE("property: order estimate tracks the coefficient oracle") {
    const auto f2 = factorial_power_series(2, 0, 16.0);
    const auto f4 = factorial_power_series(4, 0, 30.0);
    REQUIRE(f2.terms().size() >= 40);
    REQUIRE(f4.terms().size() >= 40);
    CHECK(std::abs(estimate_order(f2, uniform_grid(2.0, 16.0, 40)).lambda_hat - coefficient_order_oracle(f2)) <= 0.1);
    CHECK(std::abs(estimate_order(f4, uniform_grid(5.0, 30.0, 40)).lambda_hat - coefficient_order_oracle(f4)) <= 0.1);
}

TEST_CASE("Fabry gaps") {
    std::vector<std::uint64_t> sq, lin, slow;
    for (std::uint64_t k = 1; k <= 40; ++k) {
        sq.push_back(k * k);
        lin.push_back(2 * k);
        slow.push_back(k * static_cast<std::uint64_t>(std::floor(std::log(static_cast<double>(k) + 2.0))));
    }
    const auto a = fabry_gap_check(gap_series(sq));
    CHECK(a.consistent);
    CHECK(a.ratios.back() == doctest::Approx(1600.0 / 39.0));
    const auto b = fabry_gap_check(gap_series(lin));
    CHECK(!b.consistent);
    // exponents must increase, so drop repeats before building the series
    slow.erase(std::unique(slow.begin(), slow.end()), slow.end());
    const auto c = fabry_gap_check(gap_series(slow));
    CHECK(!c.consistent);
    CHECK(c.ratios.size() == slow.size() - 1);
    CHECK_THROWS_AS((void)fabry_gap_check(monomial(2)), Error);
}

TEST_CASE("exceptional set") {
    const auto grid = uniform_grid(0.01, 5.0, 50);
    const auto e = exceptional_set(ez(), 0.5, grid);
    REQUIRE(e.set.intervals().size() == 1);
    CHECK(e.set.measure(0.0, 10.0) == doctest::Approx(5.0 - 0.01));

    // 2 + z inside the unit disc: log(2 - r) <= 0.05 log(2 + r) never holds
    const EntireFunction two_plus_z = SparseSeries::polynomial({{2.0, 0.0}, {1.0, 0.0}}, {0, 1});
    const auto g = exceptional_set(two_plus_z, 0.05, uniform_grid(std::log(0.01), std::log(0.9), 40));
    CHECK(g.set.empty());
    for (const auto& c : g.cells) CHECK(!c.excluded);

    CHECK_THROWS_AS((void)exceptional_set(ez(), 1.0, grid), Error);
}

TEST_CASE("property: exceptional set complement") {
    const auto grid = uniform_grid(0.0, 14.0, 120);
    for (double eps2 : {0.3, std::cos(0.3 * M_PI), 0.8}) {
        const auto e = exceptional_set(quarter(), eps2, grid);
        for (const auto& c : e.cells) {
            if (c.excluded) continue;
            if (!c.marked) CHECK(c.log_min > eps2 * c.log_max);
            CHECK(e.set.contains(c.mid) == c.marked);
        }
    }
}

TEST_CASE("property: density bounds and monotonicity") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    std::vector<double> windows;
    for (int i = 1; i <= 10; ++i) windows.push_back(5.0 * i);
    for (int trial = 0; trial < 50; ++trial) {
        IntervalSet small, big;
        for (int k = 0; k < 6; ++k) {
            const double a = u(rng), b = a + u(rng) / 10.0;
            small.add(a, b);
            big.add(a, b);
            const double c = u(rng);
            big.add(c, c + u(rng) / 10.0);
        }
        const auto ds = upper_log_density(small, windows);
        const auto db = upper_log_density(big, windows);
        CHECK(ds.value >= 0.0);
        CHECK(db.value <= 1.0);
        for (std::size_t i = 0; i < windows.size(); ++i) CHECK(ds.per_window[i] <= db.per_window[i] + 1e-15);
    }
}

TEST_CASE("delta membership") {
    const auto e = delta_membership(ez(), 0.89, 0.5, uniform_grid(0.01, 6.0, 120));
    CHECK(!e.consistent);
    CHECK(e.density.value > 0.99);

    // 10 + z for r < 4.5: log(10 - r) > 0.05 log(10 + r) throughout, so E is empty
    const EntireFunction ten_plus_z = SparseSeries::polynomial({{10.0, 0.0}, {1.0, 0.0}}, {0, 1});
    const auto g = delta_membership(ten_plus_z, 0.1, 0.05, uniform_grid(0.01, 1.5, 40));
    CHECK(g.density.value == 0.0);
    CHECK(g.consistent);
}

TEST_CASE("spike finder") {
    const auto s = spike_finder(quarter(), 8.0, 1.5);
    REQUIRE(s.found);
    CHECK(s.t_prime > 8.0);
    CHECK(s.t_prime < 12.0);
    // post-hoc check at a tighter tolerance
    const auto tight = quarter().with_tolerance(quarter().tolerance() / 10.0);
    CHECK(min_modulus(tight, s.t_prime).value.as_double() > 1.5 * max_modulus(tight, 8.0).value.as_double());

    for (double t : {0.5, 1.0, 2.0}) CHECK(!spike_finder(ez(), t, 2.0).found);
    // far out the truncated e^z minimum is lost to cancellation and must not count as a spike
    CHECK(!spike_finder(ez(), 1.0, 5.0).found);

    // f = z: m(r') = r' < r^h on the whole open interval
    const auto z = spike_finder(monomial(1), 1.0, 1.5, 64);
    CHECK(!z.found);
    CHECK(z.margin < 0.0);
    CHECK(z.margin > -0.05);

    CHECK_THROWS_AS((void)spike_finder(ez(), 1.0, 1.0), Error);
    CHECK_THROWS_AS((void)spike_finder(ez(), 4.0, 2.0), Error);
}

TEST_CASE("three circles") {
    CHECK(hadamard_convexity_check(monomial(2), 0.5, 1.0, 3.0).defect == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(hadamard_convexity_check(ez(), 0.0, std::log(2.0), std::log(4.0)).defect ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(code_of([] { (void)hadamard_convexity_check(ez(), 1.0, 1.0, 2.0); }) == Errc::precondition);
    CHECK(code_of([] { (void)hadamard_convexity_check(monomial(2), -1.0, 1.0, 2.0); }) == Errc::precondition);

    const auto s = hadamard_convexity_sweep(quarter(), uniform_grid(0.0, 14.0, 30));
    CHECK(s.triples == 4060);
    CHECK(s.worst.defect >= -1e-9);
}

TEST_CASE("growth condition") {
    const auto g = uniform_grid(0.5, 5.0, 30);
    const auto e = growth_condition_check(ez(), 2.0, 1.5, g);
    CHECK(e.fraction == 1.0);
    CHECK(!e.first_failure);

    const auto c = growth_condition_check(monomial(3), 2.0, 1.5, uniform_grid(0.1, 20.0, 200));
    REQUIRE(c.first_failure);
    CHECK(*c.first_failure > std::log(4.0) - 0.11);
    CHECK(*c.first_failure < std::log(4.0) + 0.11);
    CHECK(!c.samples.back().holds);

    const auto u = growth_condition_check(quarter(), 4.0, 1.9, uniform_grid(2.0, 12.0, 20), GrowthMode::upper);
    CHECK(u.samples.size() == 20);
    CHECK(u.fraction == 1.0);
    CHECK(code_of([&] { (void)growth_condition_check(quarter(), 3.0, 1.9, g, GrowthMode::upper); }) == Errc::precondition);
}

TEST_CASE("Hua-Yang sequence and the crossing check") {
    CHECK(hua_yang_sequence(quarter(), 4.0, 0).steps.empty());

    const auto h = hua_yang_sequence(quarter(), 4.0, 5);
    REQUIRE(h.steps.size() >= 2);
    CHECK(h.range_exhausted);
    for (const auto& s : h.steps) {
        CHECK(s.pass);
        CHECK(s.t_t > s.window_lo);
        CHECK(s.t_t < s.window_hi);
    }
    CHECK(h.steps[1].t_r == h.steps[0].t_r_next);

    const auto e = hua_yang_sequence(ez(), 0.5, 2);
    REQUIRE(!e.steps.empty());
    CHECK(!e.steps[0].pass);

    CHECK(lemma1_crossing_check(h, {}, 3.5).pass);
    const AnnulusBracket ok{h.steps[0].t_r + 0.1, 2.0 * h.steps[0].t_r_next, BracketKind::component, 0};
    CHECK(lemma1_crossing_check(h, {ok}, 3.5).pass);
    const AnnulusBracket bad{h.steps[0].t_r - 1.0, 4.0 * h.steps[0].t_r_next, BracketKind::component, 0};
    const auto v = lemma1_crossing_check(h, {ok, bad}, 3.5);
    CHECK(v.hypotheses_verified);
    CHECK(!v.pass);
    REQUIRE(v.counterexample);
    CHECK(v.index == 1);
    CHECK(!lemma1_crossing_check(e, {}, 3.5).hypotheses_verified);
    CHECK_THROWS_AS((void)lemma1_crossing_check(h, {}, 3.0), Error);
}

TEST_CASE("order gap sequence") {
    const auto order = estimate_order(ez(), uniform_grid(0.5, 6.0, 40));
    const auto r = order_gap_sequence(ez(), order, 2.0, 1.5, 1.0, 5);
    REQUIRE(!r.steps.empty());
    for (const auto& s : r.steps) CHECK(s.pass);
    CHECK(r.steps[0].lhs == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(r.range_exhausted);

    const EntireFunction z5 = monomial(5);
    const auto p = estimate_order(z5, uniform_grid(1.0, 10.0, 20));
    CHECK(code_of([&] { (void)order_gap_sequence(z5, p, 2.0, 1.5, 1.0, 3); }) == Errc::precondition);
    CHECK(code_of([&] { (void)order_gap_sequence(ez(), order, 0.5, 1.5, 1.0, 3); }) == Errc::precondition);
    CHECK(code_of([&] { (void)order_gap_sequence(ez(), order, 2.0, 1.0, 1.0, 3); }) == Errc::precondition);

    const auto q = estimate_order(quarter(), uniform_grid(2.0, 15.0, 40));
    const auto s = order_gap_sequence(quarter(), q, 3.0, 2.0, 1.5, 2);
    REQUIRE(s.steps.size() == 2);
    for (const auto& st : s.steps) CHECK(st.margin == doctest::Approx(st.lhs - st.rhs));
}
