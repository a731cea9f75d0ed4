#include <doctest.h>

#include "fatoulab/dynamics.hpp"
#include "fatoulab/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace fatoulab;

namespace {

const RadiiTable& desk() {
    static const RadiiTable t = build_radii(Real("0.003"), Real(4), LambdaRule{1.0, false}, 64);
    return t;
}

const EntireFunction& desk_f() {
    static const EntireFunction f = baker_function(desk());
    return f;
}

EntireFunction z_squared() { return SparseSeries::polynomial({{1.0, 0.0}}, {2}); }

}  // namespace

TEST_CASE("orbits of z^2") {
    auto p = escape_params(z_squared());
    CHECK(p.escape_t == 20.0);
    const auto o = iterate_log(z_squared(), std::log(2.0), 0.3, p);
    CHECK(o.status == OrbitStatus::escaped);
    REQUIRE(o.escape_step);
    for (std::size_t k = 0; k < o.t.size(); ++k)
        CHECK(o.t[k] == doctest::Approx(std::ldexp(std::log(2.0), static_cast<int>(k))).epsilon(1e-13));
    CHECK(o.t.back() > p.escape_t);
    CHECK(o.theta[1] == doctest::Approx(0.6));

    const auto b = iterate_log(z_squared(), std::log(0.5), 0.0, p);
    CHECK(b.status == OrbitStatus::bounded_window);
    CHECK(b.t.size() == p.max_steps + 1);
    CHECK(b.t.back() < -1000.0);

    const auto zero = iterate_log(z_squared(), -std::numeric_limits<double>::infinity(), 0.0, p);
    CHECK(zero.status == OrbitStatus::bounded_window);
}

TEST_CASE("desk orbit crosses successive annuli") {
    const auto p = escape_params(desk_f(), &desk());
    CHECK(p.escape_t == doctest::Approx(2.0 * desk().t(14)));
    const double t0 = 5.5;
    const auto o = iterate_log(desk_f(), t0, 0.0, p);
    REQUIRE(o.annulus.size() == 2);
    CHECK(o.annulus[0] == std::optional<std::size_t>{13});
    CHECK(o.annulus[1] == std::optional<std::size_t>{14});
    CHECK(o.status == OrbitStatus::escaped);
    CHECK(o.phase() == std::optional<long>{13});
    // the image must sit inside the invariance bounds of A_14
    const auto v = verify_forward_invariance(desk_f().baker(), desk(), 13);
    CHECK(v.pass);
    CHECK(o.t[1] >= 2.0 * desk().t(14));
    CHECK(o.t[1] <= desk().t(15) / 2.0);
}

TEST_CASE("ray classification") {
    auto p = escape_params(z_squared());
    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i)
        if (i != 0) grid.push_back(0.05 * i);
    const auto r = classify_ray(z_squared(), 0.0, grid, p);
    for (const auto& s : r) CHECK(s.status == (s.t < 0.0 ? OrbitStatus::bounded_window : OrbitStatus::escaped));

    // odd exponents: theta = pi gives the same escape steps inside A_13
    const auto odd = build_radii(Real("0.003"), Real(4), LambdaRule{1.0, true}, 64);
    const EntireFunction g = baker_function(odd);
    const auto q = escape_params(g, &odd);
    const auto rep = annuli(odd);
    REQUIRE(!rep.brackets.empty());
    const auto& a = rep.brackets.front();
    const std::vector<double> inside{a.t_inner + 0.1 * (a.t_outer - a.t_inner), 0.5 * (a.t_inner + a.t_outer),
                                     a.t_outer - 0.1 * (a.t_outer - a.t_inner)};
    const auto pos = classify_ray(g, 0.0, inside, q);
    const auto neg = classify_ray(g, std::numbers::pi, inside, q);
    for (std::size_t i = 0; i < inside.size(); ++i) {
        CHECK(pos[i].status == OrbitStatus::escaped);
        CHECK(neg[i].status == pos[i].status);
        CHECK(neg[i].escape_step == pos[i].escape_step);
    }
}

TEST_CASE("component detection") {
    const auto raw = detect_components(desk_f(), desk(), 0);
    REQUIRE(!raw.empty());
    for (const auto& c : raw) {
        if (c.kind != ComponentKind::wandering_annulus) continue;
        CHECK(c.bracket.t_inner == c.bound_inner);
        CHECK(c.bracket.t_outer == c.bound_outer);
        CHECK(c.bound_inner == desk().t(c.n - 1) / 2.0);
        CHECK(c.bound_outer == 2.0 * desk().t(c.n + 1));
    }

    const auto refined = detect_components(desk_f(), desk(), 30);
    std::size_t wandering = 0;
    for (const auto& c : refined) {
        if (c.kind != ComponentKind::wandering_annulus) continue;
        ++wandering;
        CHECK(c.bound_inner <= c.bracket.t_inner);
        CHECK(c.bracket.t_inner <= c.seed_inner);
        CHECK(c.seed_outer <= c.bracket.t_outer);
        CHECK(c.bracket.t_outer <= c.bound_outer);
        CHECK(c.b1 >= 1.0);
        CHECK(c.log_b0 >= 0.0);
        if (c.bracket.t_inner >= std::log(30.0)) CHECK(c.b2 <= c.b1);
    }
    CHECK(wandering == 3);
    CHECK(refined[0].bracket.t_inner > raw[0].bracket.t_inner);

    auto swapped = desk();
    std::swap(swapped.log_radius[12], swapped.log_radius[13]);
    CHECK_THROWS_AS((void)detect_components(desk_f(), swapped, 4), Error);
}

TEST_CASE("b ratios") {
    const auto one = component_from_bracket(std::log(10.0), std::log(100.0), ComponentKind::gap_component);
    CHECK(one.b1 == doctest::Approx(std::log(103.0) / std::log(13.0)).epsilon(1e-14));
    CHECK(one.b1 == doctest::Approx(1.807).epsilon(1e-3));
    CHECK(one.b0 == doctest::Approx(101.0 / 11.0).epsilon(1e-14));
    CHECK(one.b2 == doctest::Approx(std::log(std::log(130.0)) / std::log(13.0)).epsilon(1e-14));

    const auto circle = component_from_bracket(2.0, 2.0, ComponentKind::gap_component);
    CHECK(circle.b1 == 1.0);
    CHECK(circle.b0 == 1.0);

    // overflow-free at huge radii
    const auto far = component_from_bracket(1e3, 1e6, ComponentKind::gap_component);
    CHECK(std::isinf(far.b0));
    CHECK(far.log_b0 == doctest::Approx(1e6 - 1e3));
    CHECK(far.b1 == doctest::Approx(1e3));

    const auto comps = detect_components(desk_f(), desk(), 30);
    std::vector<ComponentEstimate> growing;
    BRatios last{};
    for (const auto& c : comps) {
        growing.push_back(c);
        const auto r = b_ratios(growing);
        if (growing.size() > 1) {
            CHECK(r.b1 >= last.b1);
            CHECK(r.b2 >= last.b2);
            CHECK(r.log_b0 >= last.log_b0);
        }
        last = r;
    }
    CHECK(last.b2 <= 6.0 * (2.0 * 1.0 + 1.0));
    CHECK(b_ratios(detect_components(desk_f(), desk(), 0)).b2 <= 18.0);
    CHECK_THROWS_AS((void)b_ratios({}), Error);
}

TEST_CASE("strong uniform failure witness") {
    const auto comps = detect_components(desk_f(), desk(), 30);
    const auto w = strong_uniform_failure_witness(comps, 5.0);
    REQUIRE(w.found);
    CHECK(w.n == 13);
    CHECK(w.contribution >= 1.0);

    const std::vector<ComponentEstimate> list{component_from_bracket(1.0, 1.0, ComponentKind::gap_component),
                                              component_from_bracket(1.0, 1.5, ComponentKind::gap_component, 7)};
    const auto v = strong_uniform_failure_witness(list, 1.0001);
    REQUIRE(v.found);
    CHECK(v.position == 1);
    CHECK(!strong_uniform_failure_witness({}, 5.0).found);
    CHECK(!strong_uniform_failure_witness(list, 50.0).found);
}

TEST_CASE("hyperbolic radial bound") {
    const double ninf = -std::numeric_limits<double>::infinity();
    CHECK(hyperbolic_radial_bound(0.0, 2.0, ninf) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hyperbolic_radial_bound(1.5, 1.5, 0.3) == 0.0);
    CHECK(hyperbolic_radial_bound(0.0, std::log(3.0), 0.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
    CHECK(hyperbolic_radial_bound(1e5, 2e5, 10.0) == doctest::Approx(5e4));
    CHECK_THROWS_AS((void)hyperbolic_radial_bound(2.0, 1.0, 0.0), Error);
}

TEST_CASE("escape grid") {
    auto p = escape_params(z_squared());
    p.fast = true;
    const auto g = render_escape_grid(z_squared(), Region{}, 41, 41, p);
    for (std::size_t j = 0; j < g.height; ++j)
        for (std::size_t i = 0; i < g.width; ++i) {
            const double r = std::exp(g.t0[j * g.width + i]);
            if (r < 0.95) CHECK(g.at(i, j) == OrbitStatus::bounded_window);
            if (r > 1.05) CHECK(g.at(i, j) == OrbitStatus::escaped);
        }
    const auto single = render_escape_grid(z_squared(), Region{}, 1, 1, p);
    CHECK(single.status.size() == 1);
    CHECK(single.at(0, 0) == OrbitStatus::bounded_window);
    CHECK_THROWS_AS((void)render_escape_grid(z_squared(), Region{}, 0, 4, p), Error);

    std::ostringstream pgm, a, b;
    write_pgm(pgm, single);
    CHECK(pgm.str() == "P2\n1 1\n255\n0\n");
    write_escape_csv(a, g);
    write_escape_csv(b, render_escape_grid(z_squared(), Region{}, 41, 41, p));
    CHECK(a.str() == b.str());
}

TEST_CASE("property: escape coherence inside a wandering bracket") {
    auto p = escape_params(desk_f(), &desk());
    const auto comps = detect_components(desk_f(), desk(), 30);
    const auto& u = comps.front();
    REQUIRE(u.kind == ComponentKind::wandering_annulus);
    const Region region{true, u.seed_inner, u.seed_outer, -std::numbers::pi, std::numbers::pi};
    const auto g = render_escape_grid(desk_f(), region, 8, 8, p);
    std::size_t escaped = 0;
    for (std::size_t idx = 0; idx < g.status.size(); ++idx) {
        if (g.status[idx] != OrbitStatus::escaped) continue;
        ++escaped;
        const auto o = iterate_log(desk_f(), g.t0[idx], g.theta0[idx], p);
        std::optional<std::size_t> prev;
        for (const auto& a : o.annulus) {
            if (!a) continue;
            if (prev) CHECK(*a > *prev);
            prev = a;
        }
    }
    CHECK(escaped == g.status.size());
}

TEST_CASE("components json") {
    const std::vector<ComponentEstimate> list{
        component_from_bracket(-std::numeric_limits<double>::infinity(), 1.0, ComponentKind::central)};
    const auto s = components_json(list);
    CHECK(s.find("\"central\"") != std::string::npos);
    CHECK(s.find("\"-inf\"") != std::string::npos);
}
