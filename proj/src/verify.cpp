#include "hslab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hslab/cheb.hpp"

namespace hslab {

std::string identity_name(IdentityId id) {
    switch (id) {
        case IdentityId::HS_BASE: return "HS_BASE";
        case IdentityId::HS_GENERAL: return "HS_GENERAL";
        case IdentityId::HS_CONDITIONAL: return "HS_CONDITIONAL";
        case IdentityId::HARDY_NORM: return "HARDY_NORM";
        case IdentityId::COND_HARDY_NORM: return "COND_HARDY_NORM";
        case IdentityId::LP_SQUARE: return "LP_SQUARE";
        case IdentityId::MARTINGALE_ISO: return "MARTINGALE_ISO";
        case IdentityId::LOCALTIME_CHAR: return "LOCALTIME_CHAR";
        case IdentityId::P1_EXAMPLE: return "P1_EXAMPLE";
    }
    return "?";
}

IdentityId identity_from_name(const std::string& name) {
    for (IdentityId id :
         {IdentityId::HS_BASE, IdentityId::HS_GENERAL, IdentityId::HS_CONDITIONAL,
          IdentityId::HARDY_NORM, IdentityId::COND_HARDY_NORM, IdentityId::LP_SQUARE,
          IdentityId::MARTINGALE_ISO, IdentityId::LOCALTIME_CHAR, IdentityId::P1_EXAMPLE})
        if (identity_name(id) == name) return id;
    throw ConfigError("unknown identity id: " + name);
}

namespace {

void add_term(IdentityReport& rep, const std::string& name, const std::string& pathway,
              double value, double unc) {
    rep.terms.push_back({name, pathway, value, unc});
}

Comparison make_check(const std::string& name, double a, double b, double thr) {
    Comparison c{name, a, b, thr, std::abs(a - b) <= thr};
    return c;
}

// fast evaluation wrapper: Poisson extensions cost a quadrature per call, so
// Monte Carlo pathways and nested integrals run on a piecewise-Chebyshev
// cache of the interior values (direct evaluation outside and at the rim)
HarmonicFunction cache_interior(const HarmonicFunction& u, const DomainGeometry& D) {
    if (u.certificate != HarmonicCertificate::PoissonExtension || D.dim != 1) return u;
    DomainGeometry b = D.as_ball();
    auto raw = u.value;
    auto f1 = [raw](double z) { return raw(Point(z)); };
    double lo = b.center[0] - b.radius, hi = b.center[0] + b.radius;
    PiecewiseCheb cache = PiecewiseCheb::build(f1, lo, hi);
    HarmonicFunction out = u;
    out.value = [cache, raw, lo, hi](const Point& p) {
        double z = p[0];
        if (z <= lo || z >= hi) return raw(p);
        return cache.eval(z);
    };
    return out;
}

// profile of phi(w(.)) with level-crossing registration where phi has kinks
// or curvature concentration
Profile1D phi_profile(const Profile1D& w, const ConvexSpec& spec, double scan_lo,
                      double scan_hi) {
    Profile1D p = w;
    auto wf = w.f;
    ConvexSpec s = spec;
    p.f = [wf, s](double z) { return s.value(wf(z)); };
    p.far_value = spec.value(w.far_value);
    p.growth_exponent = w.growth_exponent * phi_growth_exponent(spec);
    std::vector<double> levels;
    if (spec.kind() == ConvexKind::AbsValue || spec.p() < 2.0) levels.push_back(0.0);
    for (const auto& atom : spec.curvature_measure().atoms) levels.push_back(atom.location);
    for (double lv : levels) {
        auto shifted = [wf, lv](double z) { return wf(z) - lv; };
        auto zs = find_zeros_1d(shifted, scan_lo, scan_hi, 1024);
        p.kinks.insert(p.kinks.end(), zs.begin(), zs.end());
    }
    std::sort(p.kinks.begin(), p.kinks.end());
    return p;
}

struct Scan {
    double lo, hi;
};
Scan scan_range(const DomainGeometry& U, const Profile1D& w) {
    DomainGeometry b = U.as_ball();
    double span = std::isfinite(w.support_radius)
                      ? std::max(b.radius, w.support_radius) + 2.0 * b.radius
                      : 6.0 * b.radius;
    return {b.center[0] - span, b.center[0] + span};
}

double quad_threshold(double e1, double e2) { return 2.0 * (e1 + e2) + 1e-13; }

struct RatioFn {
    HarmonicFunction fn;  // value u/h on D, 0 outside
};

RatioFn make_ratio_function(const HarmonicFunction& u, const HarmonicFunction& h,
                            const DomainGeometry& D) {
    RatioFn r;
    Profile1D p = make_ratio_profile(u, h, D);
    auto pf = p.f;
    r.fn.value = [pf](const Point& z) { return pf(z[0]); };
    if (u.has_gradient() && h.has_gradient()) {
        auto uv = u.value, hv = h.value;
        auto ug = u.gradient, hg = h.gradient;
        DomainGeometry dom = D;
        r.fn.gradient = [uv, hv, ug, hg, dom](const Point& z) {
            Point out;
            out.dim = z.dim;
            if (!dom.contains(z)) return out;
            double hh = hv(z), uu = uv(z);
            Point du = ug(z), dh = hg(z);
            for (int i = 0; i < z.dim; ++i) out[i] = (du[i] * hh - uu * dh[i]) / (hh * hh);
            return out;
        };
    }
    r.fn.certificate = HarmonicCertificate::ExplicitVerified;
    r.fn.kinks = p.kinks;
    r.fn.support_radius = p.support_radius;
    r.fn.far_center = p.far_center;
    r.fn.growth = GrowthTag::Bounded;
    r.fn.label = "ratio(" + u.label + "/" + h.label + ")";
    return r;
}

// nonlocal integrals run into a few-1e-9 resolution floor (diagonal
// evaluation near non-zero coordinates, cached-extension noise); the
// tolerances are floored accordingly so the adaptive engines stop at an
// honest error estimate instead of burning their subdivision budget
TermOptions effective_quad(const VerifyOptions& o, const OperatorModel& model) {
    TermOptions t = o.quad;
    if (model.has_jumps()) {
        t.outer.abs_tol = std::max(t.outer.abs_tol, 3e-9);
        t.outer.rel_tol = std::max(t.outer.rel_tol, 1e-8);
        t.inner.abs_tol = std::max(t.inner.abs_tol, 3e-10);
        t.inner.rel_tol = std::max(t.inner.rel_tol, 1e-9);
    }
    return t;
}

void require_density_spec(const ConvexSpec& spec) {
    if (spec.has_atoms())
        throw IncompatibleSpec(
            "curvature measure has atoms; route this case through the general-convex "
            "verifier");
}

}  // namespace

// ---------------------------------------------------------------------------

IdentityReport verify_hardy_stein(const OperatorModel& model, const DomainGeometry& D,
                                  const DomainGeometry& U, const Point& x,
                                  const HarmonicFunction& u_in, const ConvexSpec& spec,
                                  const VerifyOptions& opts) {
    if (!strictly_inside(U, D)) throw ValidationError("verify_hardy_stein: need U strictly inside D");
    if (!U.contains(x)) throw ValidationError("verify_hardy_stein: x must lie in U");
    bool pure_jump_general = spec.has_atoms() && model.pure_jump();
    if (!pure_jump_general) require_density_spec(spec);

    IdentityReport rep;
    rep.id = IdentityId::HS_BASE;
    rep.seed = opts.paths.seed;
    TermOptions tq = effective_quad(opts, model);

    HarmonicFunction u = cache_interior(u_in, D);
    Profile1D w = make_profile(u);
    Scan sc = scan_range(U, w);
    double phi_x = spec.value(u.value(x));
    add_term(rep, "phi_at_x", "exact", phi_x, 0.0);

    bool want_quad = opts.pathway != Pathway::Mc;
    bool want_mc = opts.pathway != Pathway::Quad && model.simulable();

    double lhs_q = NAN, lhs_q_err = 0.0;
    double rhs_q = NAN, rhs_q_err = 0.0;
    if (want_quad) {
        KernelSet ks(model, U);
        Profile1D fe = phi_profile(w, spec, sc.lo, sc.hi);
        QuadratureResult lhs = exit_integral(ks, x, fe, tq);
        add_term(rep, "exit_lhs", "quad", lhs.value, lhs.error_estimate);

        QuadratureResult qv;
        if (model.has_diffusion()) {
            CurvatureMeasure cm = spec.curvature_measure();
            auto g = cm.density;
            auto rho = [&](const Point& z) {
                return 0.5 * g(u.value(z)) * energy_density(model, u, z);
            };
            std::vector<double> regs = phi_profile(w, spec, sc.lo, sc.hi).kinks;
            qv = green_integral(ks, x, rho, regs, tq);
        }
        add_term(rep, "qv_half", "quad", qv.value, qv.error_estimate);

        QuadratureResult jt;
        if (model.has_jumps()) {
            jt = jump_term(ks, x, w, spec, nullptr, tq);
        }
        add_term(rep, "jump", "quad", jt.value, jt.error_estimate);

        QuadratureResult kt = killing_term(ks, x, w, spec, tq);
        if (model.has_killing()) add_term(rep, "killing", "quad", kt.value, kt.error_estimate);

        lhs_q = lhs.value;
        lhs_q_err = lhs.error_estimate;
        rhs_q = phi_x + qv.value + jt.value + kt.value;
        rhs_q_err = qv.error_estimate + jt.error_estimate + kt.error_estimate;
        rep.checks.push_back(
            make_check("quad: lhs vs rhs", lhs_q, rhs_q, quad_threshold(lhs_q_err, rhs_q_err)));
    }

    double lhs_m = NAN, lhs_m_se = 0.0;
    double rhs_m = NAN, rhs_m_se = 0.0;
    if (want_mc) {
        auto uval = u.value;
        ConvexSpec s = spec;
        EstimatorResult lhs = estimate_exit_functional(
            model, U, x, [uval, s](const Point& z) { return s.value(uval(z)); }, opts.paths);
        add_term(rep, "exit_lhs", "mc", lhs.mean, lhs.stderr_);
        lhs_m = lhs.mean;
        lhs_m_se = lhs.stderr_;

        EstimatorResult qv;
        if (model.has_diffusion()) {
            CurvatureMeasure cm = spec.curvature_measure();
            auto g = cm.density;
            qv = estimate_qv_integral(
                model, U, x, u, [g, uval](double z) { return g(uval(Point(z))); }, opts.paths);
            qv.mean *= 0.5;
            qv.stderr_ *= 0.5;
        }
        add_term(rep, "qv_half", "mc", qv.mean, qv.stderr_);

        EstimatorResult js;
        if (model.has_jumps()) js = estimate_jump_bregman_sum(model, U, x, u, spec, opts.paths);
        add_term(rep, "jump", "mc", js.mean, js.stderr_);

        rhs_m = phi_x + qv.mean + js.mean;
        rhs_m_se = qv.stderr_ + js.stderr_;
        rep.checks.push_back(make_check("mc: lhs vs rhs (same-ensemble closure family)", lhs_m,
                                        rhs_m, opts.k_sigma * (lhs_m_se + rhs_m_se) + 1e-12));
        if (want_quad) {
            if (model.has_diffusion()) {
                double vq = 0, vqe = 0;
                for (auto& t : rep.terms)
                    if (t.name == "qv_half" && t.pathway == "quad") {
                        vq = t.value;
                        vqe = t.uncertainty;
                    }
                rep.checks.push_back(make_check(
                    "term qv: mc vs quad", qv.mean, vq,
                    opts.k_sigma * qv.stderr_ + 2.0 * vqe + 1e-12));
            }
            if (model.has_jumps()) {
                // locate the quad jump term
                double jq = 0, jqe = 0;
                for (auto& t : rep.terms)
                    if (t.name == "jump" && t.pathway == "quad") {
                        jq = t.value;
                        jqe = t.uncertainty;
                    }
                rep.checks.push_back(make_check(
                    "term jump: mc vs quad", js.mean, jq,
                    opts.k_sigma * js.stderr_ + 2.0 * jqe + 0.02 * std::abs(jq) + 1e-12));
            }
        }
    }

    // headline
    if (opts.pathway == Pathway::Quad) {
        rep.lhs_total = lhs_q;
        rep.rhs_total = rhs_q;
        rep.lhs_uncertainty = lhs_q_err;
        rep.rhs_uncertainty = rhs_q_err;
        double thr = quad_threshold(lhs_q_err, rhs_q_err);
        rep.margin = thr - std::abs(lhs_q - rhs_q);
    } else if (opts.pathway == Pathway::Mc) {
        rep.lhs_total = lhs_m;
        rep.rhs_total = rhs_m;
        rep.lhs_uncertainty = lhs_m_se;
        rep.rhs_uncertainty = rhs_m_se;
        double thr = opts.k_sigma * (lhs_m_se + rhs_m_se) + 1e-12;
        rep.margin = thr - std::abs(lhs_m - rhs_m);
    } else {
        rep.lhs_total = want_mc ? lhs_m : lhs_q;
        rep.rhs_total = rhs_q;
        rep.lhs_uncertainty = want_mc ? lhs_m_se : lhs_q_err;
        rep.rhs_uncertainty = rhs_q_err;
        double thr = want_mc ? opts.k_sigma * lhs_m_se + 2.0 * rhs_q_err + 1e-12
                             : quad_threshold(lhs_q_err, rhs_q_err);
        rep.checks.push_back(make_check("headline: mc lhs vs quad rhs", rep.lhs_total,
                                        rep.rhs_total, thr));
        rep.margin = thr - std::abs(rep.lhs_total - rep.rhs_total);
    }
    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

IdentityReport verify_martingale_isometry(const OperatorModel& model, const DomainGeometry& D,
                                          const DomainGeometry& U, const Point& x,
                                          const HarmonicFunction& u, const VerifyOptions& opts) {
    IdentityReport rep = verify_hardy_stein(model, D, U, x, u, ConvexSpec::power(2.0), opts);
    rep.id = IdentityId::MARTINGALE_ISO;
    rep.notes = "p=2 closure: exit second moment vs u(x)^2 + Green potential of the energy "
                "measure";
    return rep;
}

IdentityReport verify_general_convex(const OperatorModel& model, const DomainGeometry& D,
                                     const DomainGeometry& U, const Point& x,
                                     const HarmonicFunction& u, const ConvexSpec& spec,
                                     const VerifyOptions& opts) {
    if (!(model.has_diffusion() && !model.has_jumps() && model.dim == 1))
        throw UnsupportedModel("general-convex verification runs on the 1-d diffusion only");
    if (!strictly_inside(U, D)) throw ValidationError("need U strictly inside D");

    IdentityReport rep;
    rep.id = IdentityId::HS_GENERAL;
    rep.seed = opts.paths.seed;
    TermOptions tq = effective_quad(opts, model);

    Profile1D w = make_profile(u);
    Scan sc = scan_range(U, w);
    double phi_x = spec.value(u.value(x));
    add_term(rep, "phi_at_x", "exact", phi_x, 0.0);

    KernelSet ks(model, U);
    Profile1D fe = phi_profile(w, spec, sc.lo, sc.hi);
    QuadratureResult lhs_q = exit_integral(ks, x, fe, tq);
    add_term(rep, "exit_lhs", "quad", lhs_q.value, lhs_q.error_estimate);

    CurvatureMeasure cm = spec.curvature_measure();
    auto g = cm.density;
    auto rho = [&](const Point& z) {
        return 0.5 * g(u.value(z)) * energy_density(model, u, z);
    };
    QuadratureResult qv = green_integral(ks, x, rho, fe.kinks, tq);
    add_term(rep, "density_part", "quad", qv.value, qv.error_estimate);

    // atoms: (1/2) sum_j mass_j E_x L^{level_j}
    double atoms_quad = 0.0, atoms_quad_err = 0.0;
    double atoms_mc = 0.0, atoms_mc_se = 0.0;
    bool mc = opts.pathway != Pathway::Quad && model.simulable();
    for (const auto& atom : cm.atoms) {
        QuadratureResult el_q = local_time_characterization_rhs(ks, x, u, atom.location, tq);
        add_term(rep, "local_time_L" + std::to_string(atom.location), "quad", el_q.value,
                 el_q.error_estimate);
        atoms_quad += 0.5 * atom.mass * el_q.value;
        atoms_quad_err += 0.5 * atom.mass * el_q.error_estimate;
        if (mc) {
            EstimatorResult el_m = estimate_local_time(model, U, x, u, atom.location, opts.paths);
            add_term(rep, "local_time_L" + std::to_string(atom.location), "mc", el_m.mean,
                     el_m.stderr_);
            atoms_mc += 0.5 * atom.mass * el_m.mean;
            atoms_mc_se += 0.5 * atom.mass * el_m.stderr_;
            rep.checks.push_back(make_check(
                "E L at level " + std::to_string(atom.location) + ": mc vs quad", el_m.mean,
                el_q.value,
                opts.k_sigma * el_m.stderr_ + 2.0 * el_q.error_estimate + 1e-12));
        }
    }
    add_term(rep, "atom_part", "quad", atoms_quad, atoms_quad_err);

    double rhs_q = phi_x + qv.value + atoms_quad;
    double rhs_q_err = qv.error_estimate + atoms_quad_err;
    rep.checks.push_back(make_check("quad: lhs vs rhs", lhs_q.value, rhs_q,
                                    quad_threshold(lhs_q.error_estimate, rhs_q_err)));

    if (mc) {
        auto uval = u.value;
        ConvexSpec s = spec;
        EstimatorResult lhs_m = estimate_exit_functional(
            model, U, x, [uval, s](const Point& z) { return s.value(uval(z)); }, opts.paths);
        add_term(rep, "exit_lhs", "mc", lhs_m.mean, lhs_m.stderr_);
        EstimatorResult qv_m = estimate_qv_integral(
            model, U, x, u, [g, uval](double z) { return g(uval(Point(z))); }, opts.paths);
        qv_m.mean *= 0.5;
        qv_m.stderr_ *= 0.5;
        add_term(rep, "density_part", "mc", qv_m.mean, qv_m.stderr_);
        double rhs_m = phi_x + qv_m.mean + atoms_mc;
        double rhs_m_se = qv_m.stderr_ + atoms_mc_se;
        rep.checks.push_back(make_check("mc: lhs vs rhs", lhs_m.mean, rhs_m,
                                        opts.k_sigma * (lhs_m.stderr_ + rhs_m_se) + 1e-12));
        rep.lhs_total = lhs_m.mean;
        rep.rhs_total = rhs_m;
        rep.lhs_uncertainty = lhs_m.stderr_;
        rep.rhs_uncertainty = rhs_m_se;
        double thr = opts.k_sigma * (lhs_m.stderr_ + rhs_m_se) + 1e-12;
        rep.margin = thr - std::abs(lhs_m.mean - rhs_m);
    } else {
        rep.lhs_total = lhs_q.value;
        rep.rhs_total = rhs_q;
        rep.lhs_uncertainty = lhs_q.error_estimate;
        rep.rhs_uncertainty = rhs_q_err;
        double thr = quad_threshold(lhs_q.error_estimate, rhs_q_err);
        rep.margin = thr - std::abs(lhs_q.value - rhs_q);
    }
    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

IdentityReport verify_conditional(const OperatorModel& model, const DomainGeometry& D,
                                  const DomainGeometry& U, const Point& x,
                                  const HarmonicFunction& u_in, const HarmonicFunction& h_in,
                                  const ConvexSpec& spec, const VerifyOptions& opts) {
    require_density_spec(spec);
    if (!strictly_inside(U, D)) throw ValidationError("need U strictly inside D");
    if (!u_in.zero_outside_domain || !h_in.zero_outside_domain)
        throw ValidationError("conditional identity needs singular harmonics (zero outside D)");
    // positivity of h on a sample grid
    {
        DomainGeometry bd = D.as_ball();
        for (int i = 1; i < 64; ++i) {
            double z = bd.center[0] - bd.radius + 2.0 * bd.radius * i / 64.0;
            if (!(h_in.value(Point(z)) > 0.0))
                throw ValidationError("h must be strictly positive inside D");
        }
    }

    IdentityReport rep;
    rep.id = IdentityId::HS_CONDITIONAL;
    rep.seed = opts.paths.seed;
    TermOptions tq = effective_quad(opts, model);

    HarmonicFunction u = cache_interior(u_in, D);
    HarmonicFunction h = cache_interior(h_in, D);
    RatioFn ratio = make_ratio_function(u, h, D);
    Profile1D w = make_ratio_profile(u, h, D);
    Profile1D hw = make_weight_profile(h, D);
    double hx = h.value(x);
    double wx = ratio.fn.value(x);
    double first = hx * spec.value(wx);
    add_term(rep, "h_phi_at_x", "exact", first, 0.0);

    KernelSet ks(model, U);
    Scan sc = scan_range(U, w);

    // LHS' = int phi(u/h) h dP_U  (unscaled bookkeeping)
    Profile1D fe = phi_profile(w, spec, sc.lo, sc.hi);
    {
        auto pf = fe.f;
        auto hwv = hw.f;
        fe.f = [pf, hwv](double z) {
            double ww = hwv(z);
            return ww > 0.0 ? pf(z) * ww : 0.0;
        };
        fe.kinks.insert(fe.kinks.end(), hw.kinks.begin(), hw.kinks.end());
        std::sort(fe.kinks.begin(), fe.kinks.end());
        fe.far_value = 0.0;
        fe.support_radius = hw.support_radius;
        fe.far_center = hw.far_center;
        fe.growth_exponent = 0.0;
    }
    QuadratureResult lhs_q = exit_integral(ks, x, fe, tq);
    add_term(rep, "exit_lhs_weighted", "quad", lhs_q.value, lhs_q.error_estimate);

    // conditional local part: (1/2) int G h g(w) d mu^c_(w)
    QuadratureResult qv;
    if (model.has_diffusion()) {
        CurvatureMeasure cm = spec.curvature_measure();
        auto g = cm.density;
        auto rho = [&](const Point& z) {
            double hh = hw.f(z[0]);
            if (!(hh > 0.0)) return 0.0;
            return 0.5 * hh * g(ratio.fn.value(z)) * energy_density(model, ratio.fn, z);
        };
        qv = green_integral(ks, x, rho, phi_profile(w, spec, sc.lo, sc.hi).kinks, tq);
    }
    add_term(rep, "qv_half", "quad", qv.value, qv.error_estimate);

    QuadratureResult jt;
    if (model.has_jumps()) jt = jump_term(ks, x, w, spec, &hw, tq);
    add_term(rep, "jump_weighted", "quad", jt.value, jt.error_estimate);

    double rhs_q = first + qv.value + jt.value;
    double rhs_q_err = qv.error_estimate + jt.error_estimate;
    rep.checks.push_back(make_check("quad: lhs vs rhs", lhs_q.value, rhs_q,
                                    quad_threshold(lhs_q.error_estimate, rhs_q_err)));

    bool mc = opts.pathway != Pathway::Quad && model.simulable();
    if (mc) {
        auto rf = ratio.fn.value;
        ConvexSpec s = spec;
        EstimatorResult rew = h_transform_reweight(
            model, D, U, x, [rf, s](const Point& z) { return s.value(rf(z)); }, h, opts.paths);
        double lhs_m = rew.mean * hx;  // unscaled bookkeeping
        double lhs_m_se = rew.stderr_ * hx;
        add_term(rep, "exit_lhs_weighted", "mc", lhs_m, lhs_m_se);
        rep.checks.push_back(make_check("headline: mc lhs vs quad rhs", lhs_m, rhs_q,
                                        opts.k_sigma * lhs_m_se + 2.0 * rhs_q_err + 1e-12));
        rep.lhs_total = lhs_m;
        rep.rhs_total = rhs_q;
        rep.lhs_uncertainty = lhs_m_se;
        rep.rhs_uncertainty = rhs_q_err;
        double thr = opts.k_sigma * lhs_m_se + 2.0 * rhs_q_err + 1e-12;
        rep.margin = thr - std::abs(lhs_m - rhs_q);

        // RHS terms by Monte Carlo where the scheme supports them
        if (model.has_diffusion()) {
            CurvatureMeasure cm = spec.curvature_measure();
            auto g = cm.density;
            auto hwv = hw.f;
            EstimatorResult qv_m = estimate_qv_integral(
                model, U, x, ratio.fn,
                [g, rf, hwv](double z) {
                    double hh = hwv(z);
                    return hh > 0.0 ? 0.5 * hh * g(rf(Point(z))) : 0.0;
                },
                opts.paths);
            add_term(rep, "qv_half", "mc", qv_m.mean, qv_m.stderr_);
            rep.checks.push_back(make_check(
                "term qv: mc vs quad", qv_m.mean, qv.value,
                opts.k_sigma * qv_m.stderr_ + 2.0 * qv.error_estimate + 1e-12));
        }
        if (model.has_jumps()) {
            auto hwv = hw.f;
            EstimatorResult js = estimate_jump_bregman_sum(model, U, x, ratio.fn, spec,
                                                           opts.paths, hwv);
            add_term(rep, "jump_weighted", "mc", js.mean, js.stderr_);
            rep.checks.push_back(make_check(
                "term jump: mc vs quad", js.mean, jt.value,
                opts.k_sigma * js.stderr_ + 2.0 * jt.error_estimate + 0.02 * std::abs(jt.value) +
                    1e-12));
        }
    } else {
        rep.lhs_total = lhs_q.value;
        rep.rhs_total = rhs_q;
        rep.lhs_uncertainty = lhs_q.error_estimate;
        rep.rhs_uncertainty = rhs_q_err;
        double thr = quad_threshold(lhs_q.error_estimate, rhs_q_err);
        rep.margin = thr - std::abs(lhs_q.value - rhs_q);
    }
    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

IdentityReport verify_localtime_characterization(const OperatorModel& model,
                                                 const DomainGeometry& U, const Point& x,
                                                 const HarmonicFunction& u, double level,
                                                 const VerifyOptions& opts) {
    IdentityReport rep;
    rep.id = IdentityId::LOCALTIME_CHAR;
    rep.seed = opts.paths.seed;
    TermOptions tq = effective_quad(opts, model);
    KernelSet ks(model, U);
    QuadratureResult q = local_time_characterization_rhs(ks, x, u, level, tq);
    add_term(rep, "potential_rhs", "quad", q.value, q.error_estimate);
    rep.checks.push_back(
        make_check("nonnegative", std::max(q.value, 0.0), q.value, q.error_estimate + 1e-12));

    bool mc = model.has_diffusion() && !model.has_jumps() && model.simulable() &&
              opts.pathway != Pathway::Quad;
    if (mc) {
        EstimatorResult t = estimate_local_time(model, U, x, u, level, opts.paths);
        add_term(rep, "tanaka_mc", "mc", t.mean, t.stderr_);
        double thr = std::max(opts.k_sigma * t.stderr_ + 2.0 * q.error_estimate,
                              opts.rel_tol_limit * std::abs(q.value));
        rep.checks.push_back(make_check("mc vs quad", t.mean, q.value, thr));
        rep.lhs_total = t.mean;
        rep.lhs_uncertainty = t.stderr_;
        rep.rhs_total = q.value;
        rep.rhs_uncertainty = q.error_estimate;
        rep.margin = thr - std::abs(t.mean - q.value);
    } else {
        rep.lhs_total = rep.rhs_total = q.value;
        rep.rhs_uncertainty = q.error_estimate;
        rep.margin = 0.0;
    }
    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

DomainGeometry ExhaustionSpec::level_domain(const DomainGeometry& D, int n) const {
    double margin = first_margin * std::pow(decay, -(n - 1));
    return D.as_ball().shrink(1.0 - margin);
}

namespace {

struct RhsAtD {
    double value = 0.0, err = 0.0;
    QuadratureResult qv, jt, kt;
};

RhsAtD hardy_rhs(const OperatorModel& model, const DomainGeometry& D, const Point& x,
                 const HarmonicFunction& u, const Profile1D& w, const ConvexSpec& spec,
                 const Profile1D* weight, const HarmonicFunction* ratio_fn,
                 const Profile1D* hw, const VerifyOptions& opts) {
    RhsAtD out;
    TermOptions tq = effective_quad(opts, model);
    KernelSet ks(model, D);
    Scan sc = scan_range(D, w);
    if (model.has_diffusion()) {
        CurvatureMeasure cm = spec.curvature_measure();
        auto g = cm.density;
        if (!weight) {
            auto rho = [&](const Point& z) {
                return 0.5 * g(u.value(z)) * energy_density(model, u, z);
            };
            out.qv = green_integral(ks, x, rho, phi_profile(w, spec, sc.lo, sc.hi).kinks,
                                    tq);
        } else {
            auto rho = [&](const Point& z) {
                double hh = hw->f(z[0]);
                if (!(hh > 0.0)) return 0.0;
                return 0.5 * hh * g(ratio_fn->value(z)) *
                       energy_density(model, *ratio_fn, z);
            };
            out.qv = green_integral(ks, x, rho, phi_profile(w, spec, sc.lo, sc.hi).kinks,
                                    tq);
        }
    }
    if (model.has_jumps()) out.jt = jump_term(ks, x, w, spec, weight, tq);
    if (model.has_killing()) out.kt = killing_term(ks, x, w, spec, tq);
    out.value = out.qv.value + out.jt.value + out.kt.value;
    out.err = out.qv.error_estimate + out.jt.error_estimate + out.kt.error_estimate;
    return out;
}

}  // namespace

IdentityReport hardy_norm(const OperatorModel& model, const DomainGeometry& D, const Point& x,
                          const HarmonicFunction& u_in, const ConvexSpec& spec,
                          const ExhaustionSpec& ex, const VerifyOptions& opts) {
    if (spec.has_atoms() && !model.pure_jump())
        throw IncompatibleSpec("atomic curvature in the Hardy norm needs a pure-jump model");
    IdentityReport rep;
    rep.id = IdentityId::HARDY_NORM;
    rep.seed = opts.paths.seed;
    TermOptions tq = effective_quad(opts, model);

    HarmonicFunction u = cache_interior(u_in, D);
    Profile1D w = make_profile(u);
    double phi_x = spec.value(u.value(x));
    add_term(rep, "phi_at_x", "exact", phi_x, 0.0);

    bool mc = opts.pathway != Pathway::Quad && model.simulable();
    Scan scD = scan_range(D, w);
    Profile1D fe = phi_profile(w, spec, scD.lo, scD.hi);
    auto uval = u.value;
    ConvexSpec s = spec;
    auto f_mc = [uval, s](const Point& z) { return s.value(uval(z)); };

    double prev_q = -INFINITY, prev_q_err = 0.0;
    double prev_m = -INFINITY, prev_m_se = 0.0;
    double last_q = 0.0, last_q_err = 0.0, last_m = 0.0, last_m_se = 0.0;
    bool monotone_q = true, monotone_m = true;
    for (int n = 1; n <= ex.levels; ++n) {
        DomainGeometry U = ex.level_domain(D, n);
        if (!U.contains(x))
            throw ValidationError("hardy_norm: x must lie inside the first exhaustion level");
        KernelSet ks(model, U);
        QuadratureResult lq = exit_integral(ks, x, fe, tq);
        add_term(rep, "exit_U" + std::to_string(n), "quad", lq.value, lq.error_estimate);
        if (lq.value < prev_q - (lq.error_estimate + prev_q_err + 1e-13)) monotone_q = false;
        prev_q = lq.value;
        prev_q_err = lq.error_estimate;
        last_q = lq.value;
        last_q_err = lq.error_estimate;
        if (mc) {
            EstimatorResult lm = estimate_exit_functional(model, U, x, f_mc, opts.paths);
            add_term(rep, "exit_U" + std::to_string(n), "mc", lm.mean, lm.stderr_);
            if (lm.mean < prev_m - 1.0 * (lm.stderr_ + prev_m_se)) monotone_m = false;
            prev_m = lm.mean;
            prev_m_se = lm.stderr_;
            last_m = lm.mean;
            last_m_se = lm.stderr_;
        }
    }
    rep.checks.push_back(make_check("exhaustion monotone (quad)", monotone_q ? 1.0 : 0.0, 1.0,
                                    0.5));
    if (mc)
        rep.checks.push_back(make_check("exhaustion monotone (mc, 1 stderr slack)",
                                        monotone_m ? 1.0 : 0.0, 1.0, 0.5));

    RhsAtD rhs = hardy_rhs(model, D, x, u, w, spec, nullptr, nullptr, nullptr, opts);
    double rhs_total = phi_x + rhs.value;
    add_term(rep, "rhs_at_D", "quad", rhs_total, rhs.err);

    double thr = std::max(opts.rel_tol_limit * std::abs(rhs_total),
                          2.0 * (last_q_err + rhs.err) + 1e-12);
    rep.checks.push_back(make_check("limit (quad) vs rhs at D", last_q, rhs_total, thr));
    if (mc) {
        double thr_m = std::max(opts.rel_tol_limit * std::abs(rhs_total),
                                opts.k_sigma * last_m_se + 2.0 * rhs.err);
        rep.checks.push_back(make_check("limit (mc) vs rhs at D", last_m, rhs_total, thr_m));
    }
    // local models leave through the boundary of D itself; the sup is then
    // also the exit integral at D
    if (model.has_diffusion() && !model.has_jumps() && D.dim == 1) {
        KernelSet ksD(model, D);
        QuadratureResult le = exit_integral(ksD, x, fe, tq);
        rep.checks.push_back(make_check("exit at D equals rhs (diffusion refinement)", le.value,
                                        rhs_total, quad_threshold(le.error_estimate, rhs.err)));
    }

    rep.lhs_total = mc ? last_m : last_q;
    rep.lhs_uncertainty = mc ? last_m_se : last_q_err;
    rep.rhs_total = rhs_total;
    rep.rhs_uncertainty = rhs.err;
    rep.margin = thr - std::abs(last_q - rhs_total);
    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

IdentityReport conditional_hardy_norm(const OperatorModel& model, const DomainGeometry& D,
                                      const Point& x, const HarmonicFunction& u_in,
                                      const HarmonicFunction& h_in, const ConvexSpec& spec,
                                      const ExhaustionSpec& ex, const VerifyOptions& opts) {
    require_density_spec(spec);
    IdentityReport rep;
    rep.id = IdentityId::COND_HARDY_NORM;
    rep.seed = opts.paths.seed;
    TermOptions tq = effective_quad(opts, model);

    HarmonicFunction u = cache_interior(u_in, D);
    HarmonicFunction h = cache_interior(h_in, D);
    RatioFn ratio = make_ratio_function(u, h, D);
    Profile1D w = make_ratio_profile(u, h, D);
    Profile1D hw = make_weight_profile(h, D);
    double hx = h.value(x);
    double first = hx * spec.value(ratio.fn.value(x));
    add_term(rep, "h_phi_at_x", "exact", first, 0.0);

    Scan sc = scan_range(D, w);
    Profile1D fe = phi_profile(w, spec, sc.lo, sc.hi);
    {
        auto pf = fe.f;
        auto hwv = hw.f;
        fe.f = [pf, hwv](double z) {
            double ww = hwv(z);
            return ww > 0.0 ? pf(z) * ww : 0.0;
        };
        fe.kinks.insert(fe.kinks.end(), hw.kinks.begin(), hw.kinks.end());
        std::sort(fe.kinks.begin(), fe.kinks.end());
        fe.support_radius = hw.support_radius;
        fe.far_center = hw.far_center;
        fe.far_value = 0.0;
        fe.growth_exponent = 0.0;
    }

    bool mc = opts.pathway != Pathway::Quad && model.simulable();
    auto rf = ratio.fn.value;
    ConvexSpec s = spec;
    double prev_q = -INFINITY, prev_q_err = 0, last_q = 0, last_q_err = 0;
    bool monotone_q = true;
    double last_m = 0, last_m_se = 0;
    for (int n = 1; n <= ex.levels; ++n) {
        DomainGeometry U = ex.level_domain(D, n);
        KernelSet ks(model, U);
        QuadratureResult lq = exit_integral(ks, x, fe, tq);
        add_term(rep, "exit_U" + std::to_string(n), "quad", lq.value, lq.error_estimate);
        if (lq.value < prev_q - (lq.error_estimate + prev_q_err + 1e-13)) monotone_q = false;
        prev_q = lq.value;
        prev_q_err = lq.error_estimate;
        last_q = lq.value;
        last_q_err = lq.error_estimate;
        if (mc && n == ex.levels) {
            EstimatorResult rew = h_transform_reweight(
                model, D, U, x, [rf, s](const Point& z) { return s.value(rf(z)); }, h,
                opts.paths);
            last_m = rew.mean * hx;
            last_m_se = rew.stderr_ * hx;
            add_term(rep, "exit_U" + std::to_string(n), "mc", last_m, last_m_se);
        }
    }
    rep.checks.push_back(make_check("exhaustion monotone (quad)", monotone_q ? 1.0 : 0.0, 1.0,
                                    0.5));

    RhsAtD rhs =
        hardy_rhs(model, D, x, u, w, spec, &hw, &ratio.fn, &hw, opts);
    double rhs_total = first + rhs.value;
    add_term(rep, "rhs_at_D", "quad", rhs_total, rhs.err);
    add_term(rep, "norm", "quad", rhs_total / hx, rhs.err / hx);

    double thr = std::max(opts.rel_tol_limit * std::abs(rhs_total),
                          2.0 * (last_q_err + rhs.err) + 1e-12);
    rep.checks.push_back(make_check("limit (quad) vs rhs at D", last_q, rhs_total, thr));
    if (mc) {
        double thr_m = std::max(opts.rel_tol_limit * std::abs(rhs_total),
                                opts.k_sigma * last_m_se + 2.0 * rhs.err);
        rep.checks.push_back(make_check("limit (mc) vs rhs at D", last_m, rhs_total, thr_m));
    }
    rep.lhs_total = last_q;
    rep.lhs_uncertainty = last_q_err;
    rep.rhs_total = rhs_total;
    rep.rhs_uncertainty = rhs.err;
    rep.margin = thr - std::abs(last_q - rhs_total);
    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

IdentityReport p1_example(const OperatorModel& model, const DomainGeometry& D, const Point& x,
                          const HarmonicFunction& u, const ExhaustionSpec& ex,
                          const VerifyOptions& opts) {
    if (!model.pure_jump()) throw UnsupportedModel("p=1 Hardy example needs a pure-jump model");
    if (std::abs(u.value(x)) > 1e-10)
        throw ValidationError("p=1 Hardy example needs u(x) = 0");
    IdentityReport rep = hardy_norm(model, D, x, u, ConvexSpec::abs_value(), ex, opts);
    rep.id = IdentityId::P1_EXAMPLE;
    rep.notes = "p=1 norm at a zero of u: the norm is the Green potential of the "
                "absolute-value jump divergence";
    return rep;
}

SquareFunctionResult square_function(const OperatorModel& model, const DomainGeometry& D,
                                     const Point& x, const HarmonicFunction& u_in,
                                     const HarmonicFunction* h_in, const VerifyOptions& opts) {
    SquareFunctionResult out;
    ConvexSpec p2 = ConvexSpec::power(2.0);
    TermOptions tq = effective_quad(opts, model);
    HarmonicFunction u = cache_interior(u_in, D);
    KernelSet ks(model, D);
    if (!h_in) {
        Profile1D w = make_profile(u);
        if (model.has_diffusion()) {
            auto rho = [&](const Point& z) { return energy_density(model, u, z); };
            out.local_part = green_integral(ks, x, rho, {}, tq);
        }
        if (model.has_jumps()) out.jump_part = jump_term(ks, x, w, p2, nullptr, tq);
        if (model.has_killing()) out.killing_part = killing_term(ks, x, w, p2, tq);
        out.value_squared =
            out.local_part.value + out.jump_part.value + out.killing_part.value;
        out.uncertainty = out.local_part.error_estimate + out.jump_part.error_estimate +
                          out.killing_part.error_estimate;
    } else {
        HarmonicFunction h = cache_interior(*h_in, D);
        RatioFn ratio = make_ratio_function(u, h, D);
        Profile1D w = make_ratio_profile(u, h, D);
        Profile1D hw = make_weight_profile(h, D);
        double hx = h.value(x);
        if (model.has_diffusion()) {
            auto rho = [&](const Point& z) {
                double hh = hw.f(z[0]);
                if (!(hh > 0.0)) return 0.0;
                return hh * energy_density(model, ratio.fn, z);
            };
            out.local_part = green_integral(ks, x, rho, w.kinks, tq);
        }
        if (model.has_jumps()) out.jump_part = jump_term(ks, x, w, p2, &hw, tq);
        out.value_squared = (out.local_part.value + out.jump_part.value) / hx;
        out.uncertainty =
            (out.local_part.error_estimate + out.jump_part.error_estimate) / hx;
    }
    out.value = std::sqrt(std::max(0.0, out.value_squared));
    return out;
}

double lp_frozen_constant(double) { return 1.0; }

LpCheckRow lp_estimate_check(const OperatorModel& model, const DomainGeometry& D, const Point& x,
                             const HarmonicFunction& u, double p, const HarmonicFunction* h,
                             const VerifyOptions& opts) {
    if (!(p >= 2.0)) throw ValidationError("lp_estimate_check: p >= 2 required");
    LpCheckRow row;
    row.p = p;
    row.label = u.label;
    SquareFunctionResult q = square_function(model, D, x, u, h, opts);
    row.q_value = q.value;

    ConvexSpec spec = ConvexSpec::power(p);
    HarmonicFunction uc = cache_interior(u, D);
    if (!h) {
        Profile1D w = make_profile(uc);
        RhsAtD rhs = hardy_rhs(model, D, x, uc, w, spec, nullptr, nullptr, nullptr, opts);
        double total = spec.value(uc.value(x)) + rhs.value;
        row.norm = std::pow(std::max(total, 0.0), 1.0 / p);
    } else {
        HarmonicFunction hc = cache_interior(*h, D);
        RatioFn ratio = make_ratio_function(uc, hc, D);
        Profile1D w = make_ratio_profile(uc, hc, D);
        Profile1D hw = make_weight_profile(hc, D);
        double hx = hc.value(x);
        RhsAtD rhs = hardy_rhs(model, D, x, uc, w, spec, &hw, &ratio.fn, &hw, opts);
        double total = hx * spec.value(ratio.fn.value(x)) + rhs.value;
        row.norm = std::pow(std::max(total / hx, 0.0), 1.0 / p);
    }
    row.finite = std::isfinite(row.q_value) && std::isfinite(row.norm) && row.norm >= 0.0;
    row.ratio = row.norm > 0.0 ? row.q_value / row.norm : (row.q_value > 0.0 ? INFINITY : 0.0);
    return row;
}

}  // namespace hslab
