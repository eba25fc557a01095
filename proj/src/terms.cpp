#include "hslab/terms.hpp"

#include <algorithm>
#include <cmath>

namespace hslab {

namespace {

// tail pieces int_B^inf f and int_-inf^B f by the exact substitution
// y = B - 1 + 1/t (resp. mirrored), t in (0,1]
QuadratureResult tail_right(const Integrand& f, double B, const QuadratureOptions& opts) {
    auto g = [&f, B](double t) {
        double y = B - 1.0 + 1.0 / t;
        return f(y) / (t * t);
    };
    return integrate(g, 0.0, 1.0, opts, {0.0});
}

QuadratureResult tail_left(const Integrand& f, double B, const QuadratureOptions& opts) {
    auto g = [&f, B](double t) {
        double y = B + 1.0 - 1.0 / t;
        return f(y) / (t * t);
    };
    return integrate(g, 0.0, 1.0, opts, {0.0});
}

std::vector<double> clip_points(const std::vector<double>& pts, double a, double b) {
    std::vector<double> out;
    for (double p : pts)
        if (p > a && p < b) out.push_back(p);
    return out;
}

double profile_growth(const Profile1D& p) {
    return std::isfinite(p.support_radius) ? 0.0 : p.growth_exponent;
}

void check_jump_tail(const OperatorModel& model, double combined_growth,
                     const std::string& what) {
    if (combined_growth <= 0.0) return;
    if (!model.has_jumps()) return;
    if (!(combined_growth < model.jump.alpha))
        throw TailDivergence(what + ": integrand growth exponent " +
                             std::to_string(combined_growth) + " >= alpha = " +
                             std::to_string(model.jump.alpha));
}

}  // namespace

double phi_growth_exponent(const ConvexSpec& spec) {
    switch (spec.kind()) {
        case ConvexKind::PowerP: return spec.p();
        case ConvexKind::AbsValue: return 1.0;
        case ConvexKind::PiecewiseLinearQuadratic: {
            // quadratic growth unless the end pieces happen to be linear;
            // conservative choice is fine here
            return 2.0;
        }
    }
    return 2.0;
}

Profile1D make_profile(const HarmonicFunction& u) {
    Profile1D p;
    auto v = u.value;
    p.f = [v](double y) { return v(Point(y)); };
    p.kinks = u.kinks;
    p.support_radius = u.support_radius;
    p.far_center = u.far_center;
    p.far_value = u.far_value;
    switch (u.growth) {
        case GrowthTag::Bounded: p.growth_exponent = 0.0; break;
        case GrowthTag::Linear: p.growth_exponent = 1.0; break;
        case GrowthTag::Power: p.growth_exponent = u.growth_exponent; break;
    }
    return p;
}

Profile1D make_ratio_profile(const HarmonicFunction& u, const HarmonicFunction& h,
                             const DomainGeometry& D) {
    Profile1D p;
    auto uv = u.value, hv = h.value;
    DomainGeometry dom = D;
    p.f = [uv, hv, dom](double y) {
        Point py(y);
        if (!dom.contains(py)) return 0.0;
        double hh = hv(py);
        if (!(hh > 1e-280)) return 0.0;
        return uv(py) / hh;
    };
    DomainGeometry b = D.as_ball();
    p.kinks = u.kinks;
    p.kinks.insert(p.kinks.end(), h.kinks.begin(), h.kinks.end());
    p.kinks.push_back(b.center[0] - b.radius);
    p.kinks.push_back(b.center[0] + b.radius);
    std::sort(p.kinks.begin(), p.kinks.end());
    p.support_radius = b.radius;
    p.far_center = b.center[0];
    p.far_value = 0.0;
    return p;
}

Profile1D make_weight_profile(const HarmonicFunction& h, const DomainGeometry& D) {
    Profile1D p;
    auto hv = h.value;
    DomainGeometry dom = D;
    p.f = [hv, dom](double y) {
        Point py(y);
        return dom.contains(py) ? hv(py) : 0.0;
    };
    DomainGeometry b = D.as_ball();
    p.kinks = h.kinks;
    p.kinks.push_back(b.center[0] - b.radius);
    p.kinks.push_back(b.center[0] + b.radius);
    std::sort(p.kinks.begin(), p.kinks.end());
    p.support_radius = b.radius;
    p.far_center = b.center[0];
    p.far_value = 0.0;
    return p;
}

QuadratureResult green_integral(const KernelSet& ks, const Point& x,
                                const std::function<double(const Point&)>& rho,
                                std::vector<double> singular_points, const TermOptions& opts) {
    const DomainGeometry& ball = ks.ball();
    if (ball.dim == 1) {
        double l = ball.center[0] - ball.radius, r = ball.center[0] + ball.radius;
        auto f = [&](double z) {
            Point pz(z);
            return ks.green(x, pz) * rho(pz);
        };
        singular_points.push_back(x[0]);
        return integrate(f, l, r, opts.outer, std::move(singular_points));
    }
    // d >= 2: rotationally reducible case only (x at the center, rho radial
    // along the first axis)
    if (dist(x, ball.center) > 1e-12 * ball.radius)
        throw UnsupportedModelDomain("green_integral in d >= 2 requires x at the center");
    int d = ball.dim;
    double surf = d == 2 ? 2.0 * M_PI : 4.0 * M_PI;
    auto f = [&](double s) {
        Point z = ball.center;
        z[0] += s;
        return ks.green(x, z) * rho(z) * surf * std::pow(s, d - 1);
    };
    return integrate(f, 0.0, ball.radius, opts.outer, {0.0});
}

QuadratureResult bregman_jump_profile(const OperatorModel& model, double z, const Profile1D& w,
                                      const BregmanKernel& kernel, const Profile1D* weight,
                                      const TermOptions& opts) {
    QuadratureResult out;
    if (!model.has_jumps()) return out;
    if (model.dim != 1)
        throw UnsupportedModelDomain("bregman_jump_profile: d = 1 only");

    const double wz = w.f(z);
    Point pz(z);
    auto weight_at = [&](double y) { return weight ? weight->f(y) : 1.0; };
    auto integrand_abs = [&](double y) {
        double wy_weight = weight_at(y);
        if (wy_weight == 0.0) return 0.0;
        double f = kernel.F(wz, w.f(y)) * wy_weight;
        if (f == 0.0) return 0.0;
        return f * model.jump_intensity(pz, Point(y));
    };

    const double delta = opts.delta_split;

    // ---- near field in offset coordinates -------------------------------
    // around the moving singularity y = z the distance |y - z| must not be
    // formed by subtraction: the intensity is evaluated at the exact offset
    const bool variable_kernel = model.jump.kind == JumpKind::VariableStableLike;
    auto intensity_at_offset = [&](double s, double y) {
        if (!variable_kernel) return model.levy_density(s);
        return 2.0 * model.jump.cxy(pz, Point(y)) * std::pow(s, -(model.dim + model.jump.alpha));
    };
    // below eps the quadratic Taylor closed form takes over; the cutoff
    // shrinks near the kink levels of F so the expansion stays valid
    double eps = 1e-9 * std::max(1.0, delta);
    double dw = (w.f(z + 1e-6) - w.f(z - 1e-6)) * 5e5;  // w'(z), w smooth off kinks
    double level_gap = INFINITY;
    for (double lv : kernel.kink_levels) level_gap = std::min(level_gap, std::abs(wz - lv));
    if (std::isfinite(level_gap)) eps = std::min(eps, 0.5 * level_gap / (std::abs(dw) + 1e-12));
    eps = std::max(eps, 1e-300);

    if (kernel.curvature_density) {
        // (1/2) g(wz) w'(z)^2 weight(z) * int_{|s|<eps} s^2 nu(s) ds
        double g = kernel.curvature_density(wz);
        if (g != 0.0 && !variable_kernel) {
            QuadratureResult taylor;
            taylor.value = 0.5 * g * dw * dw * weight_at(z) * model.levy_truncated_variance(eps);
            taylor.error_estimate = 0.1 * std::abs(taylor.value);  // third-order remainder
            out += taylor;
        }
        // a variable kernel keeps the cutoff contribution inside the offset
        // integral; the remaining sliver below 1e-30 is beyond resolution
        // and carries s^{2-alpha-ish} mass, far below every tolerance here
        if (variable_kernel) eps = 1e-30;
    }

    for (int side : {+1, -1}) {
        // log offset: the power-law factor becomes a smooth exponential, so
        // eight decades of scale cost a handful of unit-width panels
        auto g_log = [&](double t) {
            double s = std::exp(t);
            double y = z + side * s;
            double wy_weight = weight_at(y);
            if (wy_weight == 0.0) return 0.0;
            double f = kernel.F(wz, w.f(y)) * wy_weight;
            if (f == 0.0) return 0.0;
            return f * intensity_at_offset(s, y) * s;
        };
        std::vector<double> regs;
        auto push_log = [&](double k) {
            double s = side * (k - z);
            if (s > 0.0 && std::isfinite(s)) regs.push_back(std::log(s));
        };
        for (double k : w.kinks) push_log(k);
        if (weight)
            for (double k : weight->kinks) push_log(k);
        out += integrate(g_log, std::log(eps), std::log(delta), opts.inner, std::move(regs));
    }

    // ---- mid and far field in absolute coordinates -----------------------
    double right_edge = z + 4.0 * delta;
    double left_edge = z - 4.0 * delta;
    bool right_tail_zero = false, left_tail_zero = false;
    auto fold_support = [&](const Profile1D& p, bool is_weight) {
        if (std::isfinite(p.support_radius)) {
            right_edge = std::max(right_edge, p.far_center + p.support_radius);
            left_edge = std::min(left_edge, p.far_center - p.support_radius);
            if (is_weight && p.far_value == 0.0) {
                right_tail_zero = true;
                left_tail_zero = true;
            }
        }
    };
    fold_support(w, false);
    if (weight) fold_support(*weight, true);
    if (!weight && std::isfinite(w.support_radius) && kernel.F(wz, w.far_value) == 0.0) {
        right_tail_zero = left_tail_zero = true;
    }

    std::vector<double> regs;
    for (double k : w.kinks) regs.push_back(k);
    if (weight)
        for (double k : weight->kinks) regs.push_back(k);
    out += integrate(integrand_abs, z + delta, right_edge, opts.inner, regs);
    out += integrate(integrand_abs, left_edge, z - delta, opts.inner, regs);
    if (!right_tail_zero) out += tail_right(integrand_abs, right_edge, opts.inner);
    if (!left_tail_zero) out += tail_left(integrand_abs, left_edge, opts.inner);
    return out;
}

QuadratureResult jump_term(const KernelSet& ks, const Point& x, const Profile1D& w,
                           const ConvexSpec& spec, const Profile1D* weight,
                           const TermOptions& opts) {
    const OperatorModel& model = ks.model();
    QuadratureResult out;
    if (!model.has_jumps()) return out;
    double pg = opts.phi_growth_override > 0.0 ? opts.phi_growth_override
                                               : phi_growth_exponent(spec);
    if (!weight) check_jump_tail(model, pg * profile_growth(w), "jump_term");

    const DomainGeometry& ball = ks.ball();
    if (ball.dim != 1) throw UnsupportedModelDomain("jump_term: d = 1 only");
    double l = ball.center[0] - ball.radius, r = ball.center[0] + ball.radius;

    // level-crossing loci of w: kinks of F(w(z), w(.)) for |.|-type phis and
    // curvature concentration for p < 2; registered in the inner integrals
    Profile1D wk = w;
    {
        double span = std::isfinite(w.support_radius)
                          ? std::max(w.support_radius, ball.radius) + 2.0 * ball.radius
                          : 8.0 * ball.radius;
        std::vector<double> levels{0.0};
        for (const auto& atom : spec.curvature_measure().atoms) levels.push_back(atom.location);
        for (double lv : levels) {
            auto shifted = [&w, lv](double y) { return w.f(y) - lv; };
            auto zs = find_zeros_1d(shifted, ball.center[0] - span, ball.center[0] + span, 1024);
            wk.kinks.insert(wk.kinks.end(), zs.begin(), zs.end());
        }
        std::sort(wk.kinks.begin(), wk.kinks.end());
    }

    BregmanKernel kern;
    ConvexSpec spec_copy = spec;
    kern.F = [spec_copy](double a, double b) { return spec_copy.bregman(a, b); };
    CurvatureMeasure cm = spec.curvature_measure();
    kern.curvature_density = cm.density;
    kern.kink_levels.push_back(0.0);  // power curvatures concentrate at zero
    for (const auto& atom : cm.atoms) kern.kink_levels.push_back(atom.location);
    // inner errors propagate two ways: the regular-regime absolute error
    // scales with the Green mass, and the noise-limited relative error near
    // level crossings scales with the assembled value
    double inner_abs = 0.0, inner_rel = 0.0;
    auto psi = [&](const Point& pz) {
        QuadratureResult inner = bregman_jump_profile(model, pz[0], wk, kern, weight, opts);
        if (inner.error_estimate <= 1e-6)
            inner_abs = std::max(inner_abs, inner.error_estimate);
        else if (inner.value != 0.0)
            inner_rel = std::max(inner_rel, inner.error_estimate / std::abs(inner.value));
        return inner.value;
    };

    std::vector<double> regs = clip_points(wk.kinks, l, r);
    out = green_integral(ks, x, psi, regs, opts);
    out.error_estimate += inner_abs * ks.mean_exit_time(x) + inner_rel * std::abs(out.value);
    return out;
}

QuadratureResult killing_term(const KernelSet& ks, const Point& x, const Profile1D& w,
                              const ConvexSpec& spec, const TermOptions& opts) {
    const OperatorModel& model = ks.model();
    QuadratureResult out;
    if (!model.has_killing()) return out;
    const DomainGeometry& ball = ks.ball();
    if (ball.dim != 1) throw UnsupportedModelDomain("killing_term: d = 1 only");
    double l = ball.center[0] - ball.radius, r = ball.center[0] + ball.radius;
    auto rho = [&](const Point& pz) {
        return spec.bregman(w.f(pz[0]), 0.0) * model.kappa(pz);
    };
    std::vector<double> regs = clip_points(w.kinks, l, r);
    auto zeros = find_zeros_1d(w.f, l, r);
    regs.insert(regs.end(), zeros.begin(), zeros.end());
    return green_integral(ks, x, rho, regs, opts);
}

QuadratureResult exit_integral(const KernelSet& ks, const Point& x, const Profile1D& f,
                               const TermOptions& opts) {
    QuadratureResult out;
    switch (ks.exit_law_kind()) {
        case ExitLawKind::IntervalAtoms: {
            IntervalExitAtoms a = ks.atoms(x);
            out.value = a.p_left * f.f(a.left_point) + a.p_right * f.f(a.right_point);
            out.error_estimate = 0.0;
            return out;
        }
        case ExitLawKind::SurfaceDensity:
            throw UnsupportedModelDomain(
                "exit_integral: use exit_integral_sphere for d >= 2 diffusions");
        case ExitLawKind::ExteriorDensity: {
            const DomainGeometry& ball = ks.ball();
            if (ball.dim != 1)
                throw UnsupportedModelDomain("exterior exit integrals: d = 1 only");
            check_jump_tail(ks.model(), profile_growth(f), "exit_integral");
            double c = ball.center[0], R = ball.radius;

            // integrate in the boundary-distance variable on each side; the
            // kernel singularity sits exactly at s = 0 where doubles have
            // full resolution
            double reach = 4.0;
            bool tails_zero = false;
            if (std::isfinite(f.support_radius)) {
                reach = std::max(reach, f.support_radius + std::abs(f.far_center - c) - R);
                tails_zero = f.far_value == 0.0;
            }
            for (int side : {+1, -1}) {
                auto g = [&, side](double s) {
                    double z = side > 0 ? c + R + s : c - R - s;
                    return f.f(z) * ks.poisson_at_distance(x, side, s);
                };
                std::vector<double> regs{0.0};
                for (double k : f.kinks) {
                    double s = side > 0 ? k - (c + R) : (c - R) - k;
                    if (s > 0.0) regs.push_back(s);
                }
                out += integrate(g, 0.0, reach, opts.outer, regs);
                if (!tails_zero) out += tail_right(g, reach, opts.outer);
            }
            return out;
        }
    }
    return out;
}

QuadratureResult exit_integral_sphere(const KernelSet& ks, const Point& x,
                                      const std::function<double(const Point&)>& f,
                                      const TermOptions& opts) {
    if (ks.exit_law_kind() != ExitLawKind::SurfaceDensity)
        throw UnsupportedModelDomain("exit_integral_sphere: diffusion on a ball, d >= 2");
    const DomainGeometry& ball = ks.ball();
    double R = ball.radius;
    if (ball.dim == 2) {
        auto g = [&](double th) {
            Point z = ball.center;
            z[0] += R * std::cos(th);
            z[1] += R * std::sin(th);
            return f(z) * ks.poisson(x, z) * R;
        };
        return integrate(g, 0.0, 2.0 * M_PI, opts.outer);
    }
    // d = 3: adaptive in the polar angle, fixed periodic rule in azimuth
    const int m = 64;
    auto g = [&](double th) {
        double acc = 0.0;
        for (int k = 0; k < m; ++k) {
            double ph = 2.0 * M_PI * k / m;
            Point z = ball.center;
            z[0] += R * std::sin(th) * std::cos(ph);
            z[1] += R * std::sin(th) * std::sin(ph);
            z[2] += R * std::cos(th);
            acc += f(z) * ks.poisson(x, z);
        }
        return acc * (2.0 * M_PI / m) * R * R * std::sin(th);
    };
    return integrate(g, 0.0, M_PI, opts.outer);
}

QuadratureResult local_time_characterization_rhs(const KernelSet& ks, const Point& x,
                                                 const HarmonicFunction& u, double level,
                                                 const TermOptions& opts) {
    const OperatorModel& model = ks.model();
    Profile1D w = make_profile(u);
    const double a = level;

    // |u(.) - a| exit profile, kinks where u crosses the level
    Profile1D fa = w;
    auto wf = w.f;
    fa.f = [wf, a](double z) { return std::abs(wf(z) - a); };
    fa.far_value = std::abs(w.far_value - a);
    fa.growth_exponent = w.growth_exponent;
    {
        DomainGeometry b = ks.ball();
        double span = std::isfinite(w.support_radius)
                          ? std::max(w.support_radius, b.radius) + b.radius
                          : 8.0 * b.radius;
        auto shifted = [wf, a](double z) { return wf(z) - a; };
        auto zs = find_zeros_1d(shifted, b.center[0] - span, b.center[0] + span, 2048);
        fa.kinks.insert(fa.kinks.end(), zs.begin(), zs.end());
        std::sort(fa.kinks.begin(), fa.kinks.end());
    }

    QuadratureResult exit = exit_integral(ks, x, fa, opts);

    QuadratureResult pot;  // int G_U(x,z) j_a(z) dz
    if (model.has_jumps() || model.has_killing()) {
        BregmanKernel kern;
        kern.F = [a](double s, double t) {
            return std::abs(t - a) - std::abs(s - a) - sgn_left(s - a) * (t - s);
        };
        kern.kink_levels.push_back(a);  // purely atomic curvature (2 delta_a)
        check_jump_tail(model, profile_growth(w), "local_time_characterization");
        Profile1D wk = w;  // level crossings kink the inner integrand
        wk.kinks = fa.kinks;
        double inner_abs = 0.0, inner_rel = 0.0;
        auto ja = [&](const Point& pz) {
            double z = pz[0];
            double v = 0.0;
            if (model.has_jumps()) {
                QuadratureResult inner =
                    bregman_jump_profile(model, z, wk, kern, nullptr, opts);
                if (inner.error_estimate <= 1e-6)
                    inner_abs = std::max(inner_abs, inner.error_estimate);
                else if (inner.value != 0.0)
                    inner_rel =
                        std::max(inner_rel, inner.error_estimate / std::abs(inner.value));
                v += inner.value;
            }
            if (model.has_killing()) v += kern.F(w.f(z), 0.0) * model.kappa(pz);
            return v;
        };
        DomainGeometry b = ks.ball();
        std::vector<double> regs =
            clip_points(fa.kinks, b.center[0] - b.radius, b.center[0] + b.radius);
        pot = green_integral(ks, x, ja, regs, opts);
        pot.error_estimate += inner_abs * ks.mean_exit_time(x) + inner_rel * std::abs(pot.value);
    }

    QuadratureResult out;
    out.value = exit.value - std::abs(u.value(x) - a) - pot.value;
    out.error_estimate = exit.error_estimate + pot.error_estimate;
    out.subdivisions = exit.subdivisions + pot.subdivisions;
    out.singular_points = exit.singular_points;
    return out;
}

HarmonicFunction harmonic_from_exterior_function(const OperatorModel& model,
                                                 const DomainGeometry& D,
                                                 std::function<double(double)> f,
                                                 GrowthTag growth, double growth_exponent,
                                                 std::vector<double> kinks) {
    if (model.dim != 1 || !model.pure_jump() || model.jump.kind != JumpKind::StableRadial)
        throw ValidationError("harmonic_from_exterior_function: 1-d StableRadial only");
    double q = growth == GrowthTag::Bounded ? 0.0
               : growth == GrowthTag::Linear ? 1.0
                                             : growth_exponent;
    if (q > 0.0 && !(q < model.jump.alpha))
        throw DivergentBoundaryIntegral(
            "exterior data growth |z|^" + std::to_string(q) +
            " is not integrable against the exit law for alpha = " +
            std::to_string(model.jump.alpha));

    KernelSet ks(model, D);
    DomainGeometry b = D.as_ball();
    Profile1D p;
    p.f = f;
    p.kinks = std::move(kinks);
    p.growth_exponent = q;
    TermOptions to;
    to.outer = QuadratureOptions{1e-13, 1e-11, 2000, true};

    HarmonicFunction u;
    double c = b.center[0], R = b.radius;
    u.value = [ks, p, f, c, R, to](const Point& px) {
        if (std::abs(px[0] - c) >= R) return p.f(px[0]);
        return exit_integral(ks, px, p, to).value;
    };
    u.certificate = HarmonicCertificate::PoissonExtension;
    u.growth = growth;
    u.growth_exponent = q;
    u.kinks = p.kinks;
    u.kinks.push_back(c - R);
    u.kinks.push_back(c + R);
    std::sort(u.kinks.begin(), u.kinks.end());
    u.far_center = c;
    u.label = "poisson_ext(function data)";
    return u;
}

}  // namespace hslab
