#include <doctest.h>

#include <cmath>

#include "hslab/cheb.hpp"
#include "hslab/quadrature.hpp"
#include "hslab/rng.hpp"
#include "hslab/special.hpp"

using namespace hslab;

TEST_CASE("smooth integrands to tight tolerance") {
    auto r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.error_estimate < 1e-10);

    auto g = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
    CHECK(g.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("integrable endpoint and interior singularities") {
    // int_0^1 x^{-1/2} = 2, singular at a registered endpoint
    auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                       {1e-11, 1e-10, 4000, true}, {0.0});
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));

    // interior singularity at 0.3 must be registered to converge quickly
    auto f = [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); };
    auto s = integrate(f, 0.0, 1.0, {1e-11, 1e-10, 4000, true}, {0.3});
    double expected = 2.0 * std::sqrt(0.3) + 2.0 * std::sqrt(0.7);
    // interior singular points away from 0 hit the ulp resolution wall
    CHECK(s.value == doctest::Approx(expected).epsilon(1e-7));

    // logarithmic singularity
    auto l = integrate([](double x) { return std::log(x); }, 0.0, 1.0, {}, {0.0});
    CHECK(l.value == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("kinked integrands with registration") {
    auto f = [](double x) { return std::abs(x - 0.25); };
    auto r = integrate(f, 0.0, 1.0, {}, {0.25});
    CHECK(r.value == doctest::Approx((0.25 * 0.25 + 0.75 * 0.75) / 2.0).epsilon(1e-13));
}

TEST_CASE("tolerance halving moves the value by less than twice the estimate") {
    auto f = [](double x) { return std::pow(std::abs(x - 0.3), -0.4); };
    QuadratureOptions loose{1e-6, 1e-6, 4000, true};
    QuadratureOptions tight{5e-7, 5e-7, 4000, true};
    auto a = integrate(f, 0.0, 1.0, loose, {0.3});
    auto b = integrate(f, 0.0, 1.0, tight, {0.3});
    CHECK(std::abs(a.value - b.value) <= 2.0 * (a.error_estimate + b.error_estimate));
}

TEST_CASE("max subdivision cap raises") {
    QuadratureOptions o{1e-16, 1e-16, 8, true};
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(std::abs(x)); }, 0.0, 1.0, o),
                    MaxSubdivisions);  // unregistered singularity cannot reach 1e-16
}

TEST_CASE("right tail substitution handles power decay exactly") {
    // int_2^inf x^-2 = 1/2
    auto r = integrate_right_tail([](double x) { return 1.0 / (x * x); }, 2.0);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-11));
    // heavy alpha-stable-like tail
    auto s = integrate_right_tail([](double x) { return std::pow(x, -1.7); }, 1.5);
    CHECK(s.value == doctest::Approx(std::pow(1.5, -0.7) / 0.7).epsilon(1e-10));
}

TEST_CASE("regularized incomplete beta against quadrature") {
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        double a = rng.uniform(0.1, 3.0), b = rng.uniform(0.1, 3.0);
        double x = rng.uniform(0.01, 0.99);
        auto num = integrate(
            [a, b](double t) { return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0); }, 0.0,
            x, {1e-13, 1e-12, 4000, true}, {0.0});
        double ref = num.value / std::exp(log_beta(a, b));
        CHECK(betainc(a, b, x) == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("chebyshev cache reproduces an analytic function") {
    auto f = [](double x) { return std::exp(x) * std::cos(3.0 * x); };
    PiecewiseCheb pc = PiecewiseCheb::build(f, -1.0, 1.0);
    Rng rng(5);
    for (int i = 0; i < 300; ++i) {
        double x = rng.uniform(-0.999, 0.999);
        CHECK(pc.eval(x) == doctest::Approx(f(x)).epsilon(1e-10));
    }
    // outside falls back to the exact function
    CHECK(pc.eval(1.5) == doctest::Approx(f(1.5)));
}
