#include <doctest.h>

#include <cmath>

#include "hslab/harmonic.hpp"
#include "hslab/terms.hpp"

using namespace hslab;

TEST_CASE("interval boundary interpolation is the diffusion poisson extension") {
    DomainGeometry D = DomainGeometry::interval(-1.0, 1.0);
    HarmonicFunction u = poisson_extension_brownian_interval(D, 0.0, 1.0);
    CHECK(u.value(Point(0.0)) == doctest::Approx(0.5));
    CHECK(u.value(Point(0.5)) == doctest::Approx(0.75));  // exit-probability oracle
    CHECK(u.value(Point(2.0)) == doctest::Approx(1.0));
    HarmonicFunction c = poisson_extension_brownian_interval(D, 3.0, 3.0);
    CHECK(c.value(Point(0.7)) == doctest::Approx(3.0));
    HarmonicFunction s = poisson_extension_brownian_interval(D, 0.0, 1.0, true);
    CHECK(s.value(Point(2.0)) == doctest::Approx(0.0));
    CHECK(s.zero_outside_domain);
}

TEST_CASE("stable poisson extension: interior values satisfy the mean-value identity") {
    OperatorModel st = OperatorModel::stable(1.0);
    DomainGeometry D = DomainGeometry::interval(-2.0, 2.0);
    HarmonicFunction u = poisson_extension_stable(st, D, {{2.2, 3.5, 1.0}});
    CHECK(u.value(Point(2.5)) == doctest::Approx(1.0));  // the data outside
    CHECK(u.value(Point(4.0)) == doctest::Approx(0.0));
    double u0 = u.value(Point(0.0));
    CHECK(u0 > 0.0);
    CHECK(u0 < 1.0);
    // quadrature mean value over a smaller set: E_x u(X_tau_V) = u(x)
    DomainGeometry V = DomainGeometry::interval(-1.0, 1.0);
    KernelSet ks(st, V);
    Profile1D up = make_profile(u);
    for (double x : {0.0, 0.5}) {
        auto mv = exit_integral(ks, Point(x), up);
        CHECK(mv.value == doctest::Approx(u.value(Point(x))).epsilon(1e-7));
    }
    // window validation
    CHECK_THROWS_AS(poisson_extension_stable(st, D, {{1.0, 3.0, 1.0}}), ValidationError);
}

TEST_CASE("martin-type singular harmonics satisfy the mean-value identity") {
    OperatorModel st = OperatorModel::stable(1.5);
    DomainGeometry D = DomainGeometry::interval(-2.0, 2.0);
    DomainGeometry V = DomainGeometry::interval(-1.0, 1.0);
    KernelSet ks(st, V);
    for (auto make : {martin_symmetric_stable, martin_onesided_stable}) {
        HarmonicFunction h = make(st, D);
        CHECK(h.value(Point(2.5)) == 0.0);
        CHECK(h.zero_outside_domain);
        Profile1D hp = make_profile(h);
        for (double x : {0.25, -0.6}) {
            auto mv = exit_integral(ks, Point(x), hp);
            CHECK(mv.value == doctest::Approx(h.value(Point(x))).epsilon(2e-7));
        }
    }
    // the ratio of the two is affine: u/h = R + x
    HarmonicFunction h = martin_symmetric_stable(st, D);
    HarmonicFunction u = martin_onesided_stable(st, D);
    for (double x : {-1.5, 0.0, 1.2})
        CHECK(u.value(Point(x)) / h.value(Point(x)) == doctest::Approx(2.0 + x).epsilon(1e-12));
}

TEST_CASE("energy density") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    CHECK(energy_density(bm, u, Point(0.3)) == doctest::Approx(1.0));
    OperatorModel bm2 = OperatorModel::brownian(2.0);
    CHECK(energy_density(bm2, u, Point(0.3)) == doctest::Approx(2.0));
    OperatorModel st = OperatorModel::stable(1.5);
    CHECK(energy_density(st, u, Point(0.3)) == 0.0);
    HarmonicFunction c = constant_function(4.0, 1);
    CHECK(energy_density(bm, c, Point(0.1)) == 0.0);
}

TEST_CASE("green integral examples") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    KernelSet ks(bm, U);
    auto one = green_integral(ks, Point(0.0), [](const Point&) { return 1.0; });
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-11));  // mean exit time
    auto zero = green_integral(ks, Point(0.3), [](const Point&) { return 0.0; });
    CHECK(zero.value == doctest::Approx(0.0));
    auto off = green_integral(ks, Point(0.5), [](const Point&) { return 1.0; });
    CHECK(off.value == doctest::Approx(0.75).epsilon(1e-11));

    // d = 2 radial reduction from the center
    OperatorModel bm2 = OperatorModel::brownian(1.0, 2);
    Point c2(0.0, 0.0);
    KernelSet ks2(bm2, DomainGeometry::ball(c2, 1.0));
    auto r2 = green_integral(ks2, c2, [](const Point&) { return 1.0; });
    CHECK(r2.value == doctest::Approx(0.5).epsilon(1e-10));
    CHECK_THROWS_AS(green_integral(ks2, Point(0.3, 0.0), [](const Point&) { return 1.0; }),
                    UnsupportedModelDomain);
}

TEST_CASE("jump term: constant functions, dual-route identity, delta-split independence") {
    OperatorModel st = OperatorModel::stable(1.5);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    KernelSet ks(st, U);

    HarmonicFunction cst = constant_function(2.0, 1);
    auto z = jump_term(ks, Point(0.0), make_profile(cst), ConvexSpec::power(2.0));
    CHECK(std::abs(z.value) < 1e-12);

    // |.|-divergence with an affine u: exit integral minus |u(x)| must equal
    // the jump potential (the pure-jump general-convex identity)
    HarmonicFunction u = affine_function(0.1, Point(1.0));
    Profile1D up = make_profile(u);
    ConvexSpec ab = ConvexSpec::abs_value();
    Profile1D absu = up;
    {
        auto f = up.f;
        absu.f = [f](double z2) { return std::abs(f(z2)); };
        absu.kinks.push_back(-0.1);  // zero of u
        absu.growth_exponent = 1.0;
    }
    for (double x : {0.0, 0.4}) {
        auto lhs = exit_integral(ks, Point(x), absu);
        auto jt = jump_term(ks, Point(x), up, ab);
        double rhs = std::abs(0.1 + x) + jt.value;
        CHECK(lhs.value ==
              doctest::Approx(rhs).epsilon(2e-6 / std::abs(rhs) + 1e-7));
        CHECK(jt.value >= 0.0);
    }

    // split-radius independence
    TermOptions t1, t2;
    t1.delta_split = 0.25;
    t2.delta_split = 0.125;
    auto a = jump_term(ks, Point(0.2), up, ab, nullptr, t1);
    auto b = jump_term(ks, Point(0.2), up, ab, nullptr, t2);
    CHECK(std::abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-12);
}

TEST_CASE("jump term growth guard") {
    OperatorModel st = OperatorModel::stable(1.5);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    KernelSet ks(st, U);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    // p * growth = 2 >= alpha: the tail is not integrable
    CHECK_THROWS_AS(jump_term(ks, Point(0.0), make_profile(u), ConvexSpec::power(2.0)),
                    TailDivergence);
    // exit integrals reject the same growth
    Profile1D sq = make_profile(u);
    {
        auto f = sq.f;
        sq.f = [f](double z) { return f(z) * f(z); };
        sq.growth_exponent = 2.0;
    }
    CHECK_THROWS_AS(exit_integral(ks, Point(0.0), sq), TailDivergence);
}

TEST_CASE("killing term with a closed-form antiderivative oracle") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    bm.killing = [](const Point&) { return 1.0; };
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    // kernels are unavailable with killing in the simulated catalog, but the
    // killing term itself is a pure Green-potential quadrature, checked on a
    // kernel set for the same diffusion without killing
    OperatorModel bm_plain = OperatorModel::brownian(1.0);
    KernelSet ks(bm_plain, U);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    // int G(0,z) z^2 dz = 1/6 for the unit-diffusion interval
    Profile1D up = make_profile(u);
    OperatorModel killed = bm_plain;
    killed.killing = [](const Point&) { return 1.0; };
    KernelSet ks2(bm_plain, U);
    // evaluate through the public op by faking the model on the kernel set:
    // the integrand is F_2(u,0) kappa = u^2
    auto kt = green_integral(ks2, Point(0.0), [&](const Point& z) {
        return ConvexSpec::power(2.0).bregman(u.value(z), 0.0) * killed.kappa(z);
    });
    CHECK(kt.value == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
    // zero cases through the public op
    auto z1 = killing_term(ks, Point(0.0), up, ConvexSpec::power(2.0));
    CHECK(z1.value == 0.0);  // kappa = 0 on this model
}

TEST_CASE("exit integral examples") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    KernelSet ks(bm, U);
    // phi(u) with u affine from the two-point law: (|-1|^p + |1|^p)/2 = 1
    for (double p : {1.5, 2.0, 3.0}) {
        Profile1D f;
        double pp = p;
        f.f = [pp](double z) { return std::pow(std::abs(z), pp); };
        auto r = exit_integral(ks, Point(0.0), f);
        CHECK(r.value == doctest::Approx(1.0));
    }
    // constant functional: kernel mass
    OperatorModel st = OperatorModel::stable(0.7);
    KernelSet ks2(st, U);
    Profile1D one;
    one.f = [](double) { return 1.0; };
    one.far_value = 1.0;
    auto m = exit_integral(ks2, Point(0.3), one);
    CHECK(m.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("local-time characterization examples") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    KernelSet ks(bm, U);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    auto base = local_time_characterization_rhs(ks, Point(0.0), u, 0.0);
    CHECK(base.value == doctest::Approx(1.0).epsilon(1e-10));
    auto off = local_time_characterization_rhs(ks, Point(0.5), u, 0.0);
    CHECK(off.value == doctest::Approx(0.5).epsilon(1e-9));
    // level outside the exit range: both sides cancel
    auto out = local_time_characterization_rhs(ks, Point(0.0), u, 2.0);
    CHECK(std::abs(out.value) < 1e-10);

    // pure jump: the potential vanishes (no continuous bracket), so the
    // characterization reduces to exit integral = |u(x)-a| + jump potential
    OperatorModel st = OperatorModel::stable(1.5);
    KernelSet ks2(st, U);
    HarmonicFunction ua = affine_function(0.1, Point(1.0));
    auto pj = local_time_characterization_rhs(ks2, Point(0.2), ua, 0.0);
    CHECK(std::abs(pj.value) <= 2e-5);
    CHECK(pj.value >= -1e-6);
}

TEST_CASE("exterior data with inadmissible growth is rejected") {
    OperatorModel st = OperatorModel::stable(0.8);
    DomainGeometry D = DomainGeometry::interval(-2.0, 2.0);
    CHECK_THROWS_AS(harmonic_from_exterior_function(
                        st, D, [](double z) { return std::abs(z); }, GrowthTag::Linear, 1.0),
                    DivergentBoundaryIntegral);
    // admissible bounded data evaluates and matches the window extension
    auto u = harmonic_from_exterior_function(
        st, D, [](double z) { return z >= 2.2 && z <= 3.5 ? 1.0 : 0.0; }, GrowthTag::Bounded,
        0.0, {2.2, 3.5});
    HarmonicFunction ref = poisson_extension_stable(st, D, {{2.2, 3.5, 1.0}});
    CHECK(u.value(Point(0.4)) == doctest::Approx(ref.value(Point(0.4))).epsilon(1e-8));
}

TEST_CASE("find_zeros_1d locates sign changes") {
    auto zs = find_zeros_1d([](double x) { return std::sin(x); }, -4.0, 4.0);
    REQUIRE(zs.size() == 3);
    CHECK(zs[0] == doctest::Approx(-M_PI).epsilon(1e-10));
    CHECK(zs[1] == doctest::Approx(0.0));
    CHECK(zs[2] == doctest::Approx(M_PI).epsilon(1e-10));
}
