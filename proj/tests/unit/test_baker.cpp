#include <doctest.h>

#include "fatoulab/baker.hpp"
#include "fatoulab/error.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace fatoulab;

namespace {

RadiiTable desk(bool odd = false) { return build_radii(Real("0.003"), Real(4), LambdaRule{1.0, odd}, 64); }

// Straight long double transcription of the recurrence; only good while
// k (t_n - t_i) stays representable, which covers the desk table.
struct Oracle {
    std::vector<long double> t;
    std::vector<unsigned long long> k;
};

Oracle oracle_table(long double c, long double r1, std::size_t count) {
    Oracle o;
    o.t.push_back(std::log(r1));
    for (std::size_t n = 1; n < count; ++n) {
        const long double x = std::exp(o.t[n - 1]);
        if (x > 4e18L) break;
        const long double near = std::nearbyint(x);
        o.k.push_back(static_cast<unsigned long long>(std::abs(x - near) < 1e-15L * x ? near : std::floor(x)));
        long double s = std::log(c);
        for (std::size_t i = 0; i < n; ++i) {
            const long double u = static_cast<long double>(o.k[i]) * (o.t[n - 1] - o.t[i]);
            s += u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
        }
        o.t.push_back(s);
    }
    return o;
}

}  // namespace

TEST_CASE("build_radii basics") {
    const auto one = build_radii(Real("0.003"), Real(4), ExplicitRule{{1}}, 2);
    REQUIRE(one.radii() == 2);
    CHECK(one.t(2) == doctest::Approx(std::log(0.006)).epsilon(1e-15));

    const auto t = desk();
    CHECK(t.t(2) < t.t(1));
    REQUIRE(t.n0_detected);
    CHECK(*t.n0_detected > 1);
    CHECK(*t.n0_detected == 3);
    CHECK(t.k(1) == 4);
    CHECK(t.status == TableStatus::exponent_overflow);
    CHECK(t.exponents() == 14);
    CHECK(t.radii() == 16);

    CHECK_THROWS_AS((void)build_radii(Real("0.5"), Real(4), LambdaRule{}, 8), Error);
    CHECK_THROWS_AS((void)build_radii(Real("0.003"), Real(2), LambdaRule{}, 8), Error);
    CHECK_THROWS_AS((void)build_radii(Real("0.003"), Real(4), LambdaRule{}, 1), Error);
    CHECK_THROWS_AS((void)build_radii(Real("0.003"), Real(4), LambdaRule{-1.0}, 8), Error);
    try {
        (void)build_radii(Real("0.5"), Real(4), LambdaRule{}, 8);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parameter_violation);
    }
}

TEST_CASE("desk table against an independent long double recurrence") {
    const auto t = desk();
    const auto o = oracle_table(0.003L, 4.0L, 15);
    REQUIRE(o.k.size() == 14);
    for (std::size_t n = 1; n <= 14; ++n) CHECK(t.k(n) == o.k[n - 1]);
    for (std::size_t n = 1; n <= 15; ++n)
        CHECK(t.t(n) == doctest::Approx(static_cast<double>(o.t[n - 1])).epsilon(1e-12));
    // frozen from the oracle run
    CHECK(o.k[12] == 12);
    CHECK(o.k[13] == 219665);
    CHECK(t.t(15) == doctest::Approx(207.03883341276265).epsilon(1e-14));
}

TEST_CASE("odd-exponent variant") {
    const auto t = desk(true);
    for (std::size_t n = 1; n <= t.exponents(); ++n) CHECK(t.k(n) % 2 == 1);
    CHECK(t.k(1) == 3);
    CHECK(t.k(2) == 1);
}

TEST_CASE("property: recurrence determinism and doubling persistence") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> c(0.0005, 0.0033), r(2.1, 8.0), lam(0.5, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Real C(c(rng)), R(r(rng));
        const LambdaRule rule{lam(rng), trial % 2 == 1};
        const auto a = build_radii(C, R, rule, 40);
        const auto b = build_radii(C, R, rule, 40);
        REQUIRE(a.radii() == b.radii());
        for (std::size_t n = 1; n <= a.radii(); ++n) CHECK(to_text(a.t_exact(n)) == to_text(b.t_exact(n)));
        CHECK(a.exponent == b.exponent);
        REQUIRE(a.n0_detected);
        for (std::size_t n = *a.n0_detected; n < a.radii(); ++n) CHECK(a.t_exact(n + 1) - a.t_exact(n) > real_log2());
    }
}

TEST_CASE("annuli") {
    const auto a = a_annulus(10.0, 100.0);
    CHECK(a.t_inner == 20.0);
    CHECK(a.t_outer == 50.0);
    CHECK(empty(a_annulus(10.0, 30.0)));

    const auto t = desk();
    const auto rep = annuli(t);
    CHECK(rep.skipped == std::vector<std::size_t>{11, 12});
    std::vector<AnnulusBracket> as, qs;
    for (const auto& b : rep.brackets) (b.kind == BracketKind::a_annulus ? as : qs).push_back(b);
    REQUIRE(as.size() == 3);
    CHECK(as.front().n == 13);
    for (std::size_t i = 0; i < as.size(); ++i) {
        CHECK(as[i].t_inner < as[i].t_outer);
        CHECK(qs[i].t_inner <= as[i].t_inner);
        CHECK(as[i].t_outer <= qs[i].t_outer);
        if (i + 1 < as.size()) CHECK(as[i].t_outer <= as[i + 1].t_inner);
    }
}

TEST_CASE("forward invariance") {
    const auto t = desk();
    const auto f = baker_function(t);
    CHECK(f.certified_t_max() == doctest::Approx(207.03883341276265 - 27.631021115928547 / 219665.0));
    std::vector<std::size_t> checkable;
    for (std::size_t n = 1; n <= t.radii(); ++n)
        if (invariance_checkable(t, n)) checkable.push_back(n);
    CHECK(checkable == std::vector<std::size_t>{13, 14});
    bool passed = false;
    for (std::size_t n : checkable) {
        const auto v = verify_forward_invariance(f, t, n);
        CHECK(v.pass);
        CHECK(v.inner_margin > 0.0);
        CHECK(v.outer_margin > 0.0);
        // no sign flip once a pass has been seen
        if (passed) CHECK(v.pass);
        passed = passed || v.pass;
    }
    CHECK_THROWS_AS((void)verify_forward_invariance(f, t, 15), Error);

    auto tampered = t;
    tampered.log_radius[14] = Real(100);  // t_15 shrunk, A_14 still nonempty
    const auto v = verify_forward_invariance(f, tampered, 13);
    CHECK(!v.pass);
    CHECK(v.outer_margin < 0.0);
}

TEST_CASE("growth markers") {
    const auto t = desk();
    const auto f = baker_function(t);
    for (std::size_t n = 1; n <= t.exponents(); ++n) {
        const auto v = verify_growth_markers(f, t, n);
        CHECK(v.pass);
        if (t.k(n) == 0) CHECK(v.bound == 0.0);
    }
    // single factor, k = 3, r = 4: log f(8) = log 0.027 < 3 log 2
    const auto toy = build_radii(Real("0.003"), Real(4), ExplicitRule{{3}}, 2);
    const auto single = BakerProduct::finite(toy.log_c, {{toy.t_exact(1), 3}});
    const auto v = verify_growth_markers(single, toy, 1);
    CHECK(!v.pass);
    CHECK(v.value == doctest::Approx(std::log(0.027)).epsilon(1e-14));
    CHECK(v.bound == doctest::Approx(3 * std::log(2.0)));
}

TEST_CASE("loglog ratio") {
    const auto t = desk();
    for (std::size_t n : {13u, 14u, 15u}) {
        const auto v = verify_loglog_ratio(t, n, 1.0);
        CHECK(v.pass);
        CHECK(v.value < 3.0);
    }
    CHECK_THROWS_AS((void)verify_loglog_ratio(t, 4, 1.0), Error);

    RadiiTable synthetic;
    synthetic.log_radius = {Real(1), Real(15), Real(20), exp(Real(30))};
    synthetic.n0_detected = 0;
    const auto v = verify_loglog_ratio(synthetic, 3, 1.0);
    CHECK(v.value == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(v.pass);
    CHECK(!verify_loglog_ratio(synthetic, 3, 0.5).pass);
}

TEST_CASE("gap density and the M < 4m quotient") {
    const auto t = desk(true);
    const auto r = gap_density_bound(t);
    CHECK(r.density.value <= 0.6);
    CHECK(r.density_pass);
    CHECK(r.quotient_pass);
    CHECK(!r.quotient_checks.empty());
    CHECK_THROWS_AS((void)gap_density_bound(desk(false)), Error);
    try {
        (void)gap_density_bound(desk(false));
    } catch (const Error& e) {
        CHECK(e.code() == Errc::even_exponent);
    }
}

TEST_CASE("table files round trip") {
    const auto t = desk();
    std::stringstream csv, side;
    write_table_csv(csv, t);
    side << table_sidecar_json(t);
    const auto back = read_table(csv, side);
    REQUIRE(back.radii() == t.radii());
    for (std::size_t n = 1; n <= t.radii(); ++n) CHECK(back.t_exact(n) == t.t_exact(n));
    CHECK(back.exponent == t.exponent);
    CHECK(back.n0_detected == t.n0_detected);
    CHECK(back.status == t.status);
    CHECK(to_text(back.log_c) == to_text(t.log_c));
}
