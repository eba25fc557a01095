#include "hslab/harmonic.hpp"

#include <algorithm>
#include <cmath>

#include "hslab/quadrature.hpp"

namespace hslab {

HarmonicFunction constant_function(double c, int dim) {
    HarmonicFunction u;
    u.value = [c](const Point&) { return c; };
    Point zero;
    zero.dim = dim;
    u.gradient = [zero](const Point&) { return zero; };
    u.certificate = HarmonicCertificate::Constant;
    u.growth = GrowthTag::Bounded;
    u.support_radius = 0.0;
    u.far_value = c;
    u.label = "const";
    return u;
}

HarmonicFunction affine_function(double c0, const Point& slope) {
    HarmonicFunction u;
    u.value = [c0, slope](const Point& p) { return c0 + dot(slope, p); };
    u.gradient = [slope](const Point&) { return slope; };
    u.certificate = HarmonicCertificate::Affine;
    u.growth = GrowthTag::Linear;
    u.label = "affine";
    return u;
}

HarmonicFunction poisson_extension_brownian_interval(const DomainGeometry& D, double f_left,
                                                     double f_right, bool singular) {
    if (D.dim != 1) throw ValidationError("interval extension: d = 1");
    DomainGeometry b = D.as_ball();
    double l = b.center[0] - b.radius, r = b.center[0] + b.radius;
    double slope = (f_right - f_left) / (r - l);
    HarmonicFunction u;
    u.value = [l, r, f_left, f_right, slope, singular](const Point& p) {
        double x = p[0];
        if (x <= l) return singular ? 0.0 : f_left;
        if (x >= r) return singular ? 0.0 : f_right;
        return f_left + slope * (x - l);
    };
    u.gradient = [slope](const Point&) { return Point(slope); };
    u.certificate = HarmonicCertificate::PoissonExtension;
    u.growth = GrowthTag::Bounded;
    u.zero_outside_domain = singular;
    u.kinks = {l, r};
    u.support_radius = b.radius;
    u.far_center = b.center[0];
    u.far_value = 0.0;
    if (!singular && (f_left != 0.0 || f_right != 0.0)) {
        // exterior values are the clamped data; still eventually constant on
        // each side, but not a single far value -- only local models use this
        // variant, and their pathways never integrate the exterior
        u.support_radius = INFINITY;
    }
    u.label = "interp[" + std::to_string(f_left) + "," + std::to_string(f_right) + "]";
    return u;
}

HarmonicFunction poisson_extension_stable(const OperatorModel& model, const DomainGeometry& D,
                                          std::vector<DataWindow> windows) {
    if (model.dim != 1 || D.dim != 1)
        throw ValidationError("stable poisson extension: d = 1 only");
    if (!model.pure_jump() || model.jump.kind != JumpKind::StableRadial)
        throw ValidationError("stable poisson extension: StableRadial model required");
    DomainGeometry ball = D.as_ball();
    double c = ball.center[0], R = ball.radius;
    for (auto& w : windows) {
        if (!(w.a < w.b)) throw ValidationError("data window: a < b required");
        bool right_of = w.a >= c + R - 1e-14;
        bool left_of = w.b <= c - R + 1e-14;
        if (!right_of && !left_of)
            throw ValidationError("data window must lie outside D");
    }
    // bounded data: admissible for every alpha (tail of the Poisson kernel
    // integrates); unbounded growth would be rejected here
    KernelSet ks(model, D);
    auto data_at = [windows](double z) {
        for (const auto& w : windows)
            if (z >= w.a && z <= w.b) return w.value;
        return 0.0;
    };
    double max_abs = 0.0;
    for (const auto& w : windows)
        max_abs = std::max(max_abs, std::max(std::abs(w.a - c), std::abs(w.b - c)));

    QuadratureOptions qo{1e-13, 1e-11, 600, true};
    auto eval = [ks, windows, data_at, c, R, qo](const Point& p) {
        double x = p[0];
        if (std::abs(x - c) >= R) return data_at(x);
        double acc = 0.0;
        for (const auto& w : windows) {
            if (w.value == 0.0) continue;
            auto f = [&](double z) { return ks.poisson(Point(x), Point(z)); };
            std::vector<double> sing;
            if (w.a <= c - R + 1e-14) sing.push_back(c - R);
            if (w.b >= c + R - 1e-14) sing.push_back(c + R);
            acc += w.value * integrate(f, w.a, w.b, qo, sing).value;
        }
        return acc;
    };

    HarmonicFunction u;
    u.value = eval;
    u.certificate = HarmonicCertificate::PoissonExtension;
    u.growth = GrowthTag::Bounded;
    u.support_radius = max_abs;
    u.far_center = c;
    u.far_value = 0.0;
    u.kinks.push_back(c - R);
    u.kinks.push_back(c + R);
    for (const auto& w : windows) {
        u.kinks.push_back(w.a);
        u.kinks.push_back(w.b);
    }
    std::sort(u.kinks.begin(), u.kinks.end());
    u.label = "poisson_ext(" + std::to_string(windows.size()) + " windows)";
    return u;
}

HarmonicFunction martin_symmetric_stable(const OperatorModel& model, const DomainGeometry& D) {
    if (model.dim != 1 || !model.pure_jump() || model.jump.kind != JumpKind::StableRadial)
        throw ValidationError("martin harmonics: 1-d StableRadial only");
    DomainGeometry b = D.as_ball();
    double c = b.center[0], R = b.radius, alpha = model.jump.alpha;
    HarmonicFunction h;
    h.value = [c, R, alpha](const Point& p) {
        double t = p[0] - c;
        double w = R * R - t * t;
        return w > 0.0 ? std::pow(w, 0.5 * alpha - 1.0) : 0.0;
    };
    h.certificate = HarmonicCertificate::ExplicitVerified;
    h.zero_outside_domain = true;
    h.growth = GrowthTag::Bounded;  // compact support; blows up only at the rim
    h.support_radius = R;
    h.far_center = c;
    h.kinks = {c - R, c + R};
    h.label = "martin_sym";
    return h;
}

HarmonicFunction martin_onesided_stable(const OperatorModel& model, const DomainGeometry& D) {
    if (model.dim != 1 || !model.pure_jump() || model.jump.kind != JumpKind::StableRadial)
        throw ValidationError("martin harmonics: 1-d StableRadial only");
    DomainGeometry b = D.as_ball();
    double c = b.center[0], R = b.radius, alpha = model.jump.alpha;
    HarmonicFunction u;
    u.value = [c, R, alpha](const Point& p) {
        double t = p[0] - c;
        double w = R * R - t * t;
        return w > 0.0 ? std::pow(w, 0.5 * alpha) / (R - t) : 0.0;
    };
    u.certificate = HarmonicCertificate::ExplicitVerified;
    u.zero_outside_domain = true;
    u.growth = GrowthTag::Bounded;
    u.support_radius = R;
    u.far_center = c;
    u.kinks = {c - R, c + R};
    u.label = "martin_right";
    return u;
}

double energy_density(const OperatorModel& model, const HarmonicFunction& u, const Point& z) {
    if (!model.has_diffusion()) return 0.0;
    if (!u.has_gradient())
        throw ValidationError("energy_density: gradient unavailable for " + u.label);
    Point g = u.gradient(z);
    if (model.isotropic_diffusion) return model.sigma2 * g.norm2();
    double acc = 0.0;
    for (int i = 0; i < model.dim; ++i)
        for (int j = 0; j < model.dim; ++j)
            acc += model.a[static_cast<size_t>(i * model.dim + j)] * g[i] * g[j];
    return acc;
}

std::vector<double> find_zeros_1d(const std::function<double(double)>& f, double a, double b,
                                  int grid) {
    std::vector<double> zeros;
    double prev_x = a, prev_f = f(a);
    for (int i = 1; i <= grid; ++i) {
        double x = a + (b - a) * i / grid;
        double fx = f(x);
        if (prev_f == 0.0) zeros.push_back(prev_x);
        if (prev_f * fx < 0.0) {
            double lo = prev_x, hi = x, flo = prev_f;
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fm < 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = fx;
    }
    return zeros;
}

}  // namespace hslab
