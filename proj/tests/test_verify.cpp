#include <doctest.h>

#include <cmath>

#include "hslab/verify.hpp"

using namespace hslab;

namespace {

VerifyOptions opts_with(long n, uint64_t seed, double step = 1e-3,
                        Pathway pathway = Pathway::Both) {
    VerifyOptions o;
    o.pathway = pathway;
    o.paths.n_paths = n;
    o.paths.seed = seed;
    o.paths.step = step;
    o.paths.workers = 2;
    return o;
}

double term_value(const IdentityReport& r, const std::string& name,
                  const std::string& pathway) {
    for (const auto& t : r.terms)
        if (t.name == name && t.pathway == pathway) return t.value;
    FAIL("missing term ", name, "/", pathway);
    return NAN;
}

}  // namespace

TEST_CASE("base identity, diffusion closed chain") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry D = DomainGeometry::interval(-2.0, 2.0);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    IdentityReport rep = verify_hardy_stein(bm, D, U, Point(0.0), u, ConvexSpec::power(2.0),
                                            opts_with(50000, 201));
    CHECK(rep.pass);
    // quadrature on both sides hits the closed values exactly
    CHECK(term_value(rep, "exit_lhs", "quad") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(term_value(rep, "qv_half", "quad") == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(term_value(rep, "jump", "quad") == doctest::Approx(0.0));
    double lq = term_value(rep, "exit_lhs", "quad");
    double rq = term_value(rep, "phi_at_x", "exact") + term_value(rep, "qv_half", "quad");
    CHECK(std::abs(lq - rq) < 1e-10);
}

TEST_CASE("base identity rejects atomic curvature outside the pure-jump route") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry D = DomainGeometry::interval(-2.0, 2.0);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    CHECK_THROWS_AS(verify_hardy_stein(bm, D, U, Point(0.0), u, ConvexSpec::abs_value(),
                                       opts_with(100, 202)),
                    IncompatibleSpec);
    CHECK_THROWS_AS(verify_hardy_stein(bm, D, D, Point(0.0), u, ConvexSpec::power(2.0),
                                       opts_with(100, 203)),
                    ValidationError);
}

TEST_CASE("base identity with a constant function is an exact tautology") {
    OperatorModel st = OperatorModel::stable(1.2);
    DomainGeometry D = DomainGeometry::interval(-2.0, 2.0);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    HarmonicFunction u = constant_function(1.7, 1);
    IdentityReport rep = verify_hardy_stein(st, D, U, Point(0.3), u, ConvexSpec::power(1.5),
                                            opts_with(2000, 204));
    CHECK(rep.pass);
    double phi_c = std::pow(1.7, 1.5);
    CHECK(rep.lhs_total == doctest::Approx(phi_c).epsilon(1e-9));
    CHECK(rep.rhs_total == doctest::Approx(phi_c).epsilon(1e-9));
}

TEST_CASE("base identity, stable model with bounded data (dual pathway)") {
    OperatorModel st = OperatorModel::stable(1.0);
    DomainGeometry D = DomainGeometry::ball(Point(0.0), 2.0);
    DomainGeometry U = DomainGeometry::ball(Point(0.0), 1.0);
    HarmonicFunction u = poisson_extension_stable(st, D, {{2.2, 3.5, 1.0}});
    IdentityReport rep = verify_hardy_stein(st, D, U, Point(0.25), u, ConvexSpec::power(1.5),
                                            opts_with(30000, 205));
    CHECK(rep.pass);
    // quad-vs-quad closes much tighter than the statistical headline
    double lq = term_value(rep, "exit_lhs", "quad");
    double rq = term_value(rep, "phi_at_x", "exact") + term_value(rep, "qv_half", "quad") +
                term_value(rep, "jump", "quad");
    CHECK(std::abs(lq - rq) <= 1e-7 * std::max(1.0, std::abs(rq)));
}

TEST_CASE("martingale isometry wrapper") {
    OperatorModel st = OperatorModel::stable(1.5);
    DomainGeometry D = DomainGeometry::ball(Point(0.0), 2.0);
    DomainGeometry U = DomainGeometry::ball(Point(0.0), 1.0);
    HarmonicFunction u = poisson_extension_stable(st, D, {{2.2, 3.5, 1.0}});
    VerifyOptions o = opts_with(0, 206, 1e-3, Pathway::Quad);
    IdentityReport rep = verify_martingale_isometry(st, D, U, Point(0.25), u, o);
    CHECK(rep.id == IdentityId::MARTINGALE_ISO);
    CHECK(rep.pass);
}

TEST_CASE("general convex identity with the absolute value") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry D = DomainGeometry::interval(-2.0, 2.0);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    VerifyOptions o = opts_with(60000, 207, 5e-4);

    IdentityReport at0 = verify_general_convex(bm, D, U, Point(0.0), u,
                                               ConvexSpec::abs_value(), o);
    CHECK(at0.pass);
    CHECK(term_value(at0, "exit_lhs", "quad") == doctest::Approx(1.0));
    CHECK(term_value(at0, "local_time_L0.000000", "quad") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(term_value(at0, "local_time_L0.000000", "mc") - 1.0) < 0.02);

    IdentityReport at05 = verify_general_convex(bm, D, U, Point(0.5), u,
                                                ConvexSpec::abs_value(), o);
    CHECK(at05.pass);
    CHECK(term_value(at05, "exit_lhs", "quad") == doctest::Approx(1.0));
    CHECK(term_value(at05, "local_time_L0.000000", "quad") ==
          doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("general convex identity with a mixed density+atom spec") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry D = DomainGeometry::interval(-2.0, 2.0);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    // phi = |x| + x^2/2: curvature = Lebesgue density 1 plus a unit atom.. the
    // atom mass is 2 from the derivative jump of |x|
    ConvexSpec plq = ConvexSpec::piecewise({0.0}, {{0.0, -1.0, 0.5}, {0.0, 1.0, 0.5}});
    IdentityReport rep =
        verify_general_convex(bm, D, U, Point(0.25), u, plq, opts_with(60000, 208, 5e-4));
    CHECK(rep.pass);
    // closed chain: E phi(X_tau) = p_r phi(1) + p_l phi(-1) = 1.5
    CHECK(term_value(rep, "exit_lhs", "quad") == doctest::Approx(1.5));
    // density part: (1/2) E int 1 d[X] = Etau/2 = (1 - x^2)/2
    CHECK(term_value(rep, "density_part", "quad") ==
          doctest::Approx(0.5 * (1.0 - 0.0625)).epsilon(1e-9));
    // atoms: E L^0 = 1 - |x|
    CHECK(term_value(rep, "atom_part", "quad") == doctest::Approx(0.75).epsilon(1e-8));

    // p = 2 routed through the general verifier matches the base identity
    IdentityReport p2a = verify_general_convex(bm, D, U, Point(0.25), u,
                                               ConvexSpec::power(2.0), opts_with(20000, 209));
    IdentityReport p2b = verify_hardy_stein(bm, D, U, Point(0.25), u, ConvexSpec::power(2.0),
                                            opts_with(20000, 209));
    CHECK(term_value(p2a, "exit_lhs", "quad") ==
          doctest::Approx(term_value(p2b, "exit_lhs", "quad")).epsilon(1e-12));
}

TEST_CASE("conditional identity, diffusion pair with closed values") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry D = DomainGeometry::interval(0.0, 1.0);
    DomainGeometry U = DomainGeometry::interval(0.25, 0.75);
    HarmonicFunction u = poisson_extension_brownian_interval(D, 1.0, 0.0, true);  // 1-x
    HarmonicFunction h = poisson_extension_brownian_interval(D, 0.0, 1.0, true);  // x
    IdentityReport rep = verify_conditional(bm, D, U, Point(0.5), u, h,
                                            ConvexSpec::power(2.0), opts_with(50000, 210));
    CHECK(rep.pass);
    CHECK(term_value(rep, "exit_lhs_weighted", "quad") ==
          doctest::Approx(7.0 / 6.0).epsilon(1e-12));
    CHECK(term_value(rep, "h_phi_at_x", "exact") == doctest::Approx(0.5));
    CHECK(term_value(rep, "qv_half", "quad") == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
    // quad sides close to 1e-8
    double gap = std::abs(term_value(rep, "exit_lhs_weighted", "quad") - 0.5 - 2.0 / 3.0);
    CHECK(gap < 1e-8);

    // u = h: both sides h(x) phi(1)
    IdentityReport triv = verify_conditional(bm, D, U, Point(0.5), h, h,
                                             ConvexSpec::power(2.0), opts_with(5000, 211));
    CHECK(triv.pass);
    CHECK(triv.rhs_total == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("conditional identity, pure-jump pair of singular harmonics") {
    OperatorModel st = OperatorModel::stable(1.5);
    DomainGeometry D = DomainGeometry::ball(Point(0.0), 2.0);
    DomainGeometry U = DomainGeometry::ball(Point(0.0), 1.0);
    HarmonicFunction u = martin_onesided_stable(st, D);
    HarmonicFunction h = martin_symmetric_stable(st, D);
    IdentityReport rep = verify_conditional(st, D, U, Point(0.25), u, h,
                                            ConvexSpec::power(2.0), opts_with(40000, 212));
    CHECK(rep.pass);
    // no local part: LHS' - h(x)(u/h)(x)^2 equals the conditional jump term
    double lhs = term_value(rep, "exit_lhs_weighted", "quad");
    double first = term_value(rep, "h_phi_at_x", "exact");
    double jump = term_value(rep, "jump_weighted", "quad");
    CHECK(term_value(rep, "qv_half", "quad") == 0.0);
    CHECK(std::abs(lhs - first - jump) <= 2e-6 * std::max(1.0, std::abs(lhs)));

    // the precondition u,h in the singular class is enforced
    HarmonicFunction pe = poisson_extension_stable(st, D, {{2.2, 3.5, 1.0}});
    CHECK_THROWS_AS(verify_conditional(st, D, U, Point(0.25), pe, h, ConvexSpec::power(2.0),
                                       opts_with(100, 213)),
                    ValidationError);
}

TEST_CASE("local-time characterization report") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry U = DomainGeometry::interval(-1.0, 1.0);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    IdentityReport rep = verify_localtime_characterization(bm, U, Point(0.0), u, 0.0,
                                                           opts_with(60000, 214, 5e-4));
    CHECK(rep.pass);
    CHECK(rep.rhs_total == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(rep.lhs_total - 1.0) < 0.02);
}

TEST_CASE("hardy norm, diffusion with the closed-form chain") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry D = DomainGeometry::interval(-2.0, 2.0);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    ExhaustionSpec ex{5, 0.4, 10.0};
    IdentityReport rep =
        hardy_norm(bm, D, Point(0.3), u, ConvexSpec::power(2.0), ex, opts_with(30000, 215));
    CHECK(rep.pass);
    // sup_U E u(X_tau)^2 = u(x)^2 + E_x tau = 4 on this interval
    CHECK(rep.rhs_total == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(rep.lhs_total > 3.9);

    // constant function: the norm is phi(c) at every level
    HarmonicFunction cu = constant_function(2.0, 1);
    IdentityReport crep =
        hardy_norm(bm, D, Point(0.3), cu, ConvexSpec::power(2.0), ex, opts_with(2000, 216));
    CHECK(crep.pass);
    CHECK(crep.rhs_total == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("conditional hardy norm: trivial ratio and the bounded-ratio pair") {
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry D = DomainGeometry::interval(0.0, 1.0);
    HarmonicFunction u = poisson_extension_brownian_interval(D, 1.0, 0.0, true);
    HarmonicFunction h = poisson_extension_brownian_interval(D, 0.2, 1.2, true);
    ExhaustionSpec ex{5, 0.4, 10.0};
    IdentityReport rep = conditional_hardy_norm(bm, D, Point(0.5), u, h,
                                                ConvexSpec::power(2.0), ex,
                                                opts_with(30000, 217));
    CHECK(rep.pass);

    IdentityReport triv = conditional_hardy_norm(bm, D, Point(0.5), h, h,
                                                 ConvexSpec::power(2.0), ex,
                                                 opts_with(5000, 218));
    CHECK(triv.pass);
    CHECK(term_value(triv, "norm", "quad") == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("p=1 hardy example at a zero of an odd extension") {
    OperatorModel st = OperatorModel::stable(0.75);
    DomainGeometry D = DomainGeometry::ball(Point(0.0), 2.0);
    HarmonicFunction u =
        poisson_extension_stable(st, D, {{2.2, 3.5, 1.0}, {-3.5, -2.2, -1.0}});
    CHECK(std::abs(u.value(Point(0.0))) < 1e-12);
    ExhaustionSpec ex{5, 0.4, 10.0};
    VerifyOptions o = opts_with(30000, 219);
    o.rel_tol_limit = 0.03;
    IdentityReport rep = p1_example(st, D, Point(0.0), u, ex, o);
    CHECK(rep.pass);
    CHECK(rep.rhs_total > 0.0);

    HarmonicFunction even = poisson_extension_stable(st, D, {{2.2, 3.5, 1.0}});
    CHECK_THROWS_AS(p1_example(st, D, Point(0.0), even, ex, o), ValidationError);
}

TEST_CASE("square function values") {
    VerifyOptions o = opts_with(100, 220);
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry D = DomainGeometry::interval(-1.0, 1.0);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    SquareFunctionResult q = square_function(bm, D, Point(0.0), u, nullptr, o);
    CHECK(q.value == doctest::Approx(1.0).epsilon(1e-10));

    HarmonicFunction cu = constant_function(5.0, 1);
    SquareFunctionResult qc = square_function(bm, D, Point(0.0), cu, nullptr, o);
    CHECK(qc.value == doctest::Approx(0.0));

    // pure jump: the square equals the p=2 jump term
    OperatorModel st = OperatorModel::stable(1.2);
    DomainGeometry D2 = DomainGeometry::ball(Point(0.0), 2.0);
    HarmonicFunction pe = poisson_extension_stable(st, D2, {{2.2, 3.5, 1.0}});
    SquareFunctionResult qs = square_function(st, D2, Point(0.25), pe, nullptr, o);
    CHECK(qs.value_squared == doctest::Approx(qs.jump_part.value).epsilon(1e-12));
    CHECK(qs.local_part.value == 0.0);
}

TEST_CASE("littlewood-paley ratios against the frozen constant") {
    VerifyOptions o = opts_with(100, 221);
    OperatorModel bm = OperatorModel::brownian(1.0);
    DomainGeometry D = DomainGeometry::interval(-1.0, 1.0);
    HarmonicFunction u = affine_function(0.0, Point(1.0));
    LpCheckRow r2 = lp_estimate_check(bm, D, Point(0.0), u, 2.0, nullptr, o);
    CHECK(r2.finite);
    CHECK(r2.ratio == doctest::Approx(1.0).epsilon(1e-9));  // isometry case
    LpCheckRow r3 = lp_estimate_check(bm, D, Point(0.0), u, 3.0, nullptr, o);
    CHECK(r3.finite);
    CHECK(r3.ratio <= lp_frozen_constant(3.0) + 1e-9);

    OperatorModel st = OperatorModel::stable(1.0);
    DomainGeometry D2 = DomainGeometry::ball(Point(0.0), 2.0);
    HarmonicFunction pe = poisson_extension_stable(st, D2, {{2.2, 3.5, 1.0}});
    LpCheckRow rs = lp_estimate_check(st, D2, Point(0.25), pe, 2.0, nullptr, o);
    CHECK(rs.finite);
    CHECK(rs.ratio <= 1.0 + 1e-9);

    // conditional variant with a bounded ratio pair
    DomainGeometry D3 = DomainGeometry::interval(0.0, 1.0);
    HarmonicFunction uu = poisson_extension_brownian_interval(D3, 1.0, 0.0, true);
    HarmonicFunction hh = poisson_extension_brownian_interval(D3, 0.2, 1.2, true);
    LpCheckRow rc = lp_estimate_check(bm, D3, Point(0.5), uu, 2.0, &hh, o);
    CHECK(rc.finite);
    CHECK(rc.ratio <= 1.0 + 1e-9);
}
