#include <doctest.h>

#include "fatoulab/error.hpp"
#include "fatoulab/modulus.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

using namespace fatoulab;

namespace {

EntireFunction one_plus_z() { return SparseSeries::polynomial({1.0, 1.0}, {0, 1}); }

BakerProduct single_factor() {
    return BakerProduct::finite(log(Real("0.003")), {{log(Real(4)), 3}});
}

// brute force in double: direct sum on a dense circle
std::pair<double, double> dense_extremes(const std::vector<std::complex<double>>& a,
                                         const std::vector<std::uint64_t>& j, double r, int points) {
    double lo = INFINITY, hi = -INFINITY;
    for (int m = 0; m < points; ++m) {
        const double th = 2.0 * M_PI * m / points;
        std::complex<double> s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::polar(std::pow(r, double(j[k])), th * j[k]);
        lo = std::min(lo, std::abs(s));
        hi = std::max(hi, std::abs(s));
    }
    return {std::log(lo), std::log(hi)};
}

}  // namespace

TEST_CASE("pointwise evaluation") {
    const auto f = one_plus_z();
    auto e = eval_log_modulus(f, std::log(2.0), 0.0);
    CHECK(e.status == EvalStatus::ok);
    CHECK(e.log_abs.value == doctest::Approx(std::log(3.0)).epsilon(1e-15));

    e = eval_log_modulus(f, 0.0, M_PI);
    CHECK(e.status == EvalStatus::zero_hit);
    CHECK(e.log_abs.is_zero());

    const EntireFunction b = single_factor();
    e = eval_log_modulus(b, std::log(8.0), M_PI);
    CHECK(e.status == EvalStatus::ok);
    CHECK(e.log_abs.value == doctest::Approx(std::log(0.021)).epsilon(1e-14));

    // z = 0
    e = eval_log_modulus(f, neg_inf, 0.0);
    CHECK(e.log_abs.value == 0.0);
}

TEST_CASE("fast evaluation agrees with the extended kernel") {
    const EntireFunction b = single_factor();
    for (double th : {0.0, 0.3, 1.7, M_PI, -2.2}) {
        const double t = std::log(8.0);
        CHECK(eval_log_modulus_fast(b, t, th).log_abs.value ==
              doctest::Approx(eval_log_modulus(b, t, th).log_abs.value).epsilon(1e-12));
    }
}

TEST_CASE("truncation index") {
    // radii doubling from r_1 = 4, k_m = m
    std::vector<BakerFactor> factors;
    const Real t1 = log(Real(4));
    for (unsigned m = 1; m <= 40; ++m) factors.push_back({t1 + Real(m - 1) * real_log2(), m});
    const auto f = BakerProduct::truncated(Real(0), factors, t1 + Real(40) * real_log2());

    SUBCASE("far below the first radius") { CHECK(truncation_index(f, to_double(t1) - 50.0) == 0); }

    SUBCASE("brute-force tail sum") {
        const double t = to_double(factors[2].log_radius) + std::log(2.0);
        long double tail = 0.0L;
        std::size_t expected = 0;
        // walk down from far beyond the table; the oracle sums the true tail term by term
        for (int m = 300; m >= 1; --m) {
            const long double tm = std::log(4.0L) + (m - 1) * std::log(2.0L);
            const long double next = tail + std::exp(m * (static_cast<long double>(t) - tm));
            if (next > 1e-12L) {
                expected = static_cast<std::size_t>(m);
                break;
            }
            tail = next;
        }
        CHECK(expected == 8);
        CHECK(truncation_index(f, t) == expected);
    }

    SUBCASE("short table") {
        std::vector<BakerFactor> three(factors.begin(), factors.begin() + 3);
        const auto g = BakerProduct::truncated(Real(0), three, factors[3].log_radius);
        CHECK_THROWS_AS((void)truncation_index(g, to_double(three[2].log_radius) + 10.0), Error);
    }
}

TEST_CASE("maximum modulus") {
    CHECK(max_modulus(one_plus_z(), std::log(2.0)).value.value == doctest::Approx(std::log(3.0)));

    const EntireFunction e = exp_series(60, std::log(19.0));
    const auto m = max_modulus(e, std::log(5.0));
    CHECK(m.shortcut);
    CHECK(std::abs(m.value.value - 5.0) < 1e-9);

    const EntireFunction b = single_factor();
    CHECK(max_modulus(b, std::log(8.0)).value.value == doctest::Approx(std::log(0.027)).epsilon(1e-14));
}

TEST_CASE("minimum modulus") {
    const auto f = one_plus_z();
    CHECK(std::abs(min_modulus(f, std::log(2.0)).value.value) < 1e-12);
    const auto z = min_modulus(f, 0.0);
    CHECK(z.status == CircleStatus::zero_on_circle);
    CHECK(z.value.is_zero());

    const EntireFunction e = exp_series(0, std::log(19.0));
    const auto m = min_modulus(e, std::log(3.0));
    CHECK(m.status == CircleStatus::ok);
    CHECK(std::abs(m.value.value + 3.0) < 1e-6);
    CHECK(std::abs(std::abs(m.theta) - M_PI) < 1e-6);

    // odd exponents: minimum on the negative axis without searching
    const EntireFunction b = single_factor();
    const auto mb = min_modulus(b, std::log(8.0));
    CHECK(mb.shortcut);
    CHECK(mb.value.value == doctest::Approx(std::log(0.021)).epsilon(1e-14));
    const auto sb = min_modulus_by_search(b, std::log(8.0));
    CHECK(sb.value.value == doctest::Approx(std::log(0.021)).epsilon(1e-12));
}

TEST_CASE("1 + z^2 has its minimum off the negative axis") {
    const EntireFunction f = SparseSeries::polynomial({1.0, 1.0}, {0, 2});
    const auto m = min_modulus(f, std::log(2.0));
    CHECK(!m.shortcut);
    CHECK(m.value.value == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(std::abs(std::abs(m.theta) - M_PI / 2) < 1e-6);
}

TEST_CASE("compose_power") {
    const auto f = SparseSeries::polynomial({1.0, 1.0}, {0, 1});
    const auto f2 = compose_power(f, 2);
    REQUIRE(f2.terms().size() == 2);
    CHECK(f2.terms()[1].exponent == 2);
    const auto f1 = compose_power(f, 1);
    CHECK(f1.terms()[1].exponent == 1);

    const auto e = exp_series(0, std::log(40.0));
    const EntireFunction e2 = compose_power(e, 2);
    const double a = min_modulus(e2, std::log(2.0)).value.value;
    const double b = min_modulus(EntireFunction(e), std::log(4.0)).value.value;
    CHECK(std::abs(a - b) < 1e-9);
}

TEST_CASE("property: compose-power identities on a t-grid") {
    const auto e = exp_series(0, std::log(30.0));
    for (unsigned n : {2u, 3u, 5u}) {
        const EntireFunction en = compose_power(e, n);
        for (double t : uniform_grid(-1.0, std::log(15.0) / n, 7)) {
            const double mn = max_modulus_by_search(en, t).value.value;
            const double m1 = max_modulus(EntireFunction(e), n * t).value.value;
            CHECK(std::abs(mn - m1) < 1e-9);
            const auto lm = min_modulus(en, t);
            REQUIRE(lm.status == CircleStatus::ok);
            const double ln = lm.value.value;
            const double l1 = min_modulus(EntireFunction(e), n * t).value.value;
            CHECK(std::abs(ln - l1) < 1e-9);
        }
    }
}

TEST_CASE("property: shortcut and search agree for positive coefficients") {
    const EntireFunction e = exp_series(0, std::log(20.0));
    const EntireFunction g = factorial_power_series(2, 0, 6.0);
    for (const auto* f : {&e, &g}) {
        const double hi = std::min(f->certified_t_max(), 3.0);
        for (double t : uniform_grid(-2.0, hi, 50)) {
            const auto a = max_modulus(*f, t);
            const auto b = max_modulus_by_search(*f, t);
            CHECK(a.shortcut);
            CHECK(std::abs(a.value.value - b.value.value) < 1e-9);
        }
    }
}

TEST_CASE("property: random polynomials against a dense brute-force circle") {
    std::mt19937 rng(20240611);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> gap(1, 4);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<std::complex<double>> a;
        std::vector<std::uint64_t> j;
        std::uint64_t exponent = 0;
        for (int k = 0; k < 5; ++k) {
            a.emplace_back(normal(rng), normal(rng));
            j.push_back(exponent);
            exponent += gap(rng);
        }
        const EntireFunction f = SparseSeries::polynomial(a, j);
        double prev = -INFINITY;
        for (double t : {-0.7, -0.1, 0.35, 0.9}) {
            const auto hi = max_modulus(f, t);
            const auto lo = min_modulus(f, t);
            const auto [blo, bhi] = dense_extremes(a, j, std::exp(t), 20000);
            CHECK(hi.value.value >= bhi - 1e-12);
            CHECK(hi.value.value <= bhi + 1e-3);
            if (lo.status == CircleStatus::ok) {
                CHECK(lo.value.value <= blo + 1e-12);
                CHECK(lo.value.value >= blo - 0.05);
            }
            CHECK(lo.value.as_double() <= hi.value.value);
            CHECK(hi.value.value >= prev - 1e-9);
            prev = hi.value.value;
        }
    }
}

TEST_CASE("property: truncation soundness") {
    std::vector<BakerFactor> factors;
    const Real t1 = log(Real(4));
    for (unsigned m = 1; m <= 30; ++m) factors.push_back({t1 + Real(m - 1) * real_log2(), m});
    const auto f = BakerProduct::truncated(log(Real("0.003")), factors, t1 + Real(30) * real_log2(), 1e-8);
    const EntireFunction coarse(f), fine(f.with_tolerance(1e-9));
    for (double t : uniform_grid(0.0, 10.0, 25))
        for (double th : {0.0, 1.0, 2.5}) {
            const auto a = eval_log_modulus(coarse, t, th);
            const auto b = eval_log_modulus(fine, t, th);
            CHECK(std::abs(a.log_abs.value - b.log_abs.value) < 1e-8);
        }
    const EntireFunction s = exp_series(40, 2.0, 1e-8);
    const EntireFunction s2 = s.with_tolerance(1e-9);
    for (double t : uniform_grid(-1.0, 2.0, 10)) {
        const auto a = eval_log_modulus(s, t, 0.4);
        const auto b = eval_log_modulus(s2, t, 0.4);
        CHECK(std::abs(a.log_abs.value - b.log_abs.value) < 1e-8);
    }
}

TEST_CASE("truncated series refuses an uncertified range") {
    CHECK_THROWS_AS((void)exp_series(10, 3.0), Error);
    CHECK(max_modulus(exp_series(60, 2.0), 2.5).status == CircleStatus::out_of_range);
}

TEST_CASE("curve export") {
    const auto curve = sample_modulus_curve(one_plus_z(), -1.0, 0.0, 3);
    std::ostringstream out;
    write_modulus_csv(out, curve);
    const std::string text = out.str();
    CHECK(text.rfind("t,logM,logm\n", 0) == 0);
    CHECK(text.find("0,0.69314718055994529,-inf") != std::string::npos);
    CHECK(format_number(0.1) == "0.10000000000000001");
}
