#include <doctest.h>

#include <cmath>

#include "hslab/models.hpp"
#include "hslab/quadrature.hpp"
#include "hslab/rng.hpp"

using namespace hslab;

TEST_CASE("containment relation") {
    auto U = DomainGeometry::interval(-1.0, 1.0);
    auto D = DomainGeometry::interval(-2.0, 2.0);
    CHECK(strictly_inside(U, D));
    CHECK_FALSE(strictly_inside(D, U));
    CHECK_FALSE(strictly_inside(U, U));  // zero margin is not strict
    CHECK(containment_margin(U, D) == doctest::Approx(1.0));

    auto B1 = DomainGeometry::ball(Point(0.3), 0.5);
    auto B2 = DomainGeometry::ball(Point(0.0), 1.0);
    CHECK(strictly_inside(B1, B2));
    CHECK(B2.contains(Point(0.99)));
    CHECK_FALSE(B2.contains(Point(1.0)));
    CHECK(DomainGeometry::interval(-1, 3).as_ball().center[0] == doctest::Approx(1.0));
}

TEST_CASE("levy constant matches the cauchy case and the tail/variance closed forms") {
    // alpha = 1, d = 1: intensity 1/(pi h^2)
    CHECK(stable_levy_constant(1, 1.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-13));
    OperatorModel cauchy = OperatorModel::stable(1.0);
    CHECK(cauchy.levy_density(2.0) == doctest::Approx(1.0 / (M_PI * 4.0)).epsilon(1e-13));

    OperatorModel st = OperatorModel::stable(1.5);
    // tail mass and truncated variance against direct quadrature
    double R = 0.7;
    auto tail = integrate_right_tail([&](double h) { return 2.0 * st.levy_density(h); }, R);
    CHECK(st.levy_tail_mass(R) == doctest::Approx(tail.value).epsilon(1e-9));
    double delta = 0.2;
    auto tv = integrate([&](double h) { return 2.0 * h * h * st.levy_density(h); }, 0.0, delta,
                        {}, {0.0});
    CHECK(st.levy_truncated_variance(delta) == doctest::Approx(tv.value).epsilon(1e-9));
}

TEST_CASE("tempered radial levy kernel") {
    OperatorModel tl = OperatorModel::radial_levy(0.75, 2.0);
    double R = 0.5;
    auto tail = integrate_right_tail([&](double h) { return 2.0 * tl.levy_density(h); }, R);
    CHECK(tl.levy_tail_mass(R) == doctest::Approx(tail.value).epsilon(1e-5));
    auto tv = integrate([&](double h) { return 2.0 * h * h * tl.levy_density(h); }, 0.0, 0.3,
                        {}, {0.0});
    CHECK(tl.levy_truncated_variance(0.3) == doctest::Approx(tv.value).epsilon(1e-5));
    // nonincreasing radial intensity
    CHECK(tl.levy_density(0.2) > tl.levy_density(0.4));
}

TEST_CASE("jump kernel symmetry on random pairs") {
    Rng rng(23);
    OperatorModel st = OperatorModel::stable(0.8);
    auto cxy = [](const Point& a, const Point& b) {
        return 1.0 + 0.5 * std::sin(a[0] + b[0]);  // symmetric by construction
    };
    OperatorModel vs = OperatorModel::stable_like(1.2, cxy, 2.0);
    for (int i = 0; i < 200; ++i) {
        Point a(rng.uniform(-3, 3)), b(rng.uniform(-3, 3));
        if (std::abs(a[0] - b[0]) < 1e-6) continue;
        CHECK(st.jump_kernel(a, b) == doctest::Approx(st.jump_kernel(b, a)));
        CHECK(vs.jump_kernel(a, b) == doctest::Approx(vs.jump_kernel(b, a)));
        // variable-coefficient bounds: C^-1 <= c <= C
        double ratio = vs.jump_kernel(a, b) /
                       (std::pow(std::abs(a[0] - b[0]), -(1.0 + 1.2)));
        CHECK(ratio >= 0.5 - 1e-12);
        CHECK(ratio <= 2.0 + 1e-12);
    }
}

TEST_CASE("model construction guards") {
    CHECK_THROWS_AS(OperatorModel::stable(2.5), ValidationError);
    CHECK_THROWS_AS(OperatorModel::brownian(0.0), ValidationError);
    CHECK_FALSE(OperatorModel::stable_like(1.0, [](const Point&, const Point&) { return 1.0; },
                                           1.0)
                    .simulable());
    OperatorModel killed = OperatorModel::brownian(1.0);
    killed.killing = [](const Point&) { return 1.0; };
    CHECK_FALSE(killed.simulable());
    CHECK(OperatorModel::mixed(1.0, 0.5).simulable());
}
