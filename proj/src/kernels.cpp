#include "hslab/kernels.hpp"

#include <cmath>

#include "hslab/quadrature.hpp"

namespace hslab {

namespace {

// (hi^e - lo^e)/e, stable for small |e| (limit log(hi/lo))
double power_diff(double e, double hi, double lo) {
    if (e == 0.0) return std::log(hi / lo);
    if (std::abs(e) < 0.25) {
        // exp-form avoids cancellation between nearly equal powers
        double lh = e * std::log(hi), ll = e * std::log(lo);
        return (std::expm1(lh) - std::expm1(ll)) / e;
    }
    return (std::pow(hi, e) - std::pow(lo, e)) / e;
}

// series for int_0^z s^{a-1}(1+s)^{-d/2} ds, z <= 1/2
double bgr_series_small(int d, double a, double z) {
    double bn = 1.0;  // binom(-d/2, n)
    double zp = std::pow(z, a);
    double sum = 0.0;
    for (int n = 0; n < 80; ++n) {
        double term = bn * zp / (n + a);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) && n > 4) break;
        bn *= (-0.5 * d - n) / (n + 1.0);
        zp *= z;
    }
    return sum;
}

// series for int_2^z0 s^{a-1}(1+s)^{-d/2} ds via t = 1/s on [1/z0, 1/2]:
// integrand t^{n + d/2 - a - 1}, antiderivatives exact
double bgr_series_tail(int d, double a, double tlo) {
    double bn = 1.0;
    double sum = 0.0;
    double half_pow = 1.0;  // (1/2)^n
    for (int n = 0; n < 80; ++n) {
        double e = n + 0.5 * d - a;
        double term = bn * power_diff(e, 0.5, tlo);
        sum += term;
        if (std::abs(bn) * half_pow < 1e-18 && n > 4) break;
        bn *= (-0.5 * d - n) / (n + 1.0);
        half_pow *= 0.5;
    }
    return sum;
}

const QuadratureOptions kProfileQuad{1e-14, 1e-13, 200, true};

}  // namespace

double bgr_profile(int d, double alpha, double z0) {
    if (z0 <= 0.0) return 0.0;
    const double a = 0.5 * alpha;
    double v = bgr_series_small(d, a, std::min(z0, 0.5));
    if (z0 > 0.5) {
        double hi = std::min(z0, 2.0);
        auto f = [d, a](double s) { return std::pow(s, a - 1.0) * std::pow(1.0 + s, -0.5 * d); };
        v += integrate(f, 0.5, hi, kProfileQuad).value;
    }
    if (z0 > 2.0) v += bgr_series_tail(d, a, 1.0 / z0);
    return v;
}

namespace {

double sphere_surface(int d) {  // surface area of the unit sphere in R^d
    switch (d) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        default: return 4.0 * M_PI;
    }
}

// ----- Brownian (generator sigma2/2 * Laplacian) on a ball of radius R -----

double green_brownian_ball(int d, double sigma2, double R, const Point& x, const Point& y) {
    double rxy = dist(x, y);
    if (rxy <= 0.0) return INFINITY;
    double ay = y.norm();
    switch (d) {
        case 1: {
            // interval (-R, R)
            double lo = std::min(x[0], y[0]), hi = std::max(x[0], y[0]);
            return (2.0 / sigma2) * (lo + R) * (R - hi) / (2.0 * R);
        }
        case 2: {
            double g;
            if (ay < 1e-300) {
                g = std::log(R / rxy) / (2.0 * M_PI);
            } else {
                Point ys = (R * R / (ay * ay)) * y;
                g = (std::log(ay * dist(x, ys) / R) - std::log(rxy)) / (2.0 * M_PI);
            }
            return 2.0 / sigma2 * g;
        }
        default: {
            double g;
            if (ay < 1e-300) {
                g = (1.0 / rxy - 1.0 / R) / (4.0 * M_PI);
            } else {
                Point ys = (R * R / (ay * ay)) * y;
                g = (1.0 / rxy - R / (ay * dist(x, ys))) / (4.0 * M_PI);
            }
            return 2.0 / sigma2 * g;
        }
    }
}

// ----- isotropic stable (generator -(-Delta)^{alpha/2}, intensity scale s) -----

double green_stable_ball(int d, double alpha, double scale, double R, const Point& x,
                         const Point& y) {
    double rxy = dist(x, y);
    if (rxy <= 0.0) return INFINITY;
    double x2 = x.norm2(), y2 = y.norm2(), R2 = R * R;
    if (x2 >= R2 || y2 >= R2) return 0.0;
    double z0 = (R2 - x2) * (R2 - y2) / (R2 * rxy * rxy);
    double kappa = std::tgamma(0.5 * d) /
                   (std::pow(2.0, alpha) * std::pow(M_PI, 0.5 * d) *
                    std::pow(std::tgamma(0.5 * alpha), 2.0));
    return kappa * std::pow(rxy, alpha - d) * bgr_profile(d, alpha, z0) / scale;
}

double poisson_stable_ball(int d, double alpha, double R, const Point& x, const Point& z) {
    double x2 = x.norm2(), z2 = z.norm2(), R2 = R * R;
    if (z2 <= R2) return 0.0;
    double C = std::tgamma(0.5 * d) * std::pow(M_PI, -0.5 * d - 1.0) *
               std::sin(0.5 * M_PI * alpha);
    return C * std::pow((R2 - x2) / (z2 - R2), 0.5 * alpha) * std::pow(dist(x, z), -d);
}

double mean_exit_stable_ball(int d, double alpha, double scale, double R, double x2) {
    double c = std::pow(2.0, -alpha) * std::tgamma(0.5 * d) /
               (std::tgamma(1.0 + 0.5 * alpha) * std::tgamma(0.5 * (d + alpha)));
    return c * std::pow(R * R - x2, 0.5 * alpha) / scale;
}

}  // namespace

bool KernelSet::available(const OperatorModel& model, const DomainGeometry& domain) {
    return unavailable_reason(model, domain).empty();
}

std::string KernelSet::unavailable_reason(const OperatorModel& model,
                                          const DomainGeometry& domain) {
    if (model.dim != domain.dim) return "model/domain dimension mismatch";
    if (model.has_killing()) return "no closed-form kernels with killing";
    if (model.has_diffusion() && model.has_jumps())
        return "no closed-form kernels for mixed diffusion+jump models";
    if (model.has_diffusion()) {
        if (!model.isotropic_diffusion) return "anisotropic diffusion not in the catalog";
        if (domain.dim > 3) return "d <= 3 only";
        return "";
    }
    if (model.jump.kind == JumpKind::StableRadial) {
        if (domain.dim > 3) return "d <= 3 only";
        return "";
    }
    if (model.jump.kind == JumpKind::RadialLevy)
        return "no closed-form kernels for general radial Levy models";
    if (model.jump.kind == JumpKind::VariableStableLike)
        return "no closed-form kernels for variable-coefficient stable-like models";
    return "trivial model";
}

KernelSet::KernelSet(const OperatorModel& model, const DomainGeometry& domain)
    : model_(model), domain_(domain), ball_(domain.as_ball()) {
    std::string why = unavailable_reason(model, domain);
    if (!why.empty()) throw UnsupportedModelDomain("kernels unavailable: " + why);
    stable_ = !model.has_diffusion();
    if (stable_)
        exit_kind_ = ExitLawKind::ExteriorDensity;
    else
        exit_kind_ = domain_.dim == 1 ? ExitLawKind::IntervalAtoms : ExitLawKind::SurfaceDensity;
}

double KernelSet::green(const Point& x, const Point& y) const {
    Point xl = x - ball_.center, yl = y - ball_.center;
    if (!ball_.contains(x) || !ball_.contains(y)) return 0.0;
    if (stable_)
        return green_stable_ball(ball_.dim, model_.jump.alpha, model_.jump.scale, ball_.radius,
                                 xl, yl);
    return green_brownian_ball(ball_.dim, model_.sigma2, ball_.radius, xl, yl);
}

double KernelSet::poisson(const Point& x, const Point& z) const {
    Point xl = x - ball_.center, zl = z - ball_.center;
    if (stable_) return poisson_stable_ball(ball_.dim, model_.jump.alpha, ball_.radius, xl, zl);
    if (exit_kind_ != ExitLawKind::SurfaceDensity)
        throw UnsupportedModelDomain("1-d diffusion exit law is atomic; use atoms()");
    // harmonic-measure density w.r.t. surface measure on the sphere
    double R = ball_.radius;
    double num = R * R - xl.norm2();
    return num / (sphere_surface(ball_.dim) * R * std::pow(dist(xl, zl), ball_.dim));
}

double KernelSet::poisson_at_distance(const Point& x, int side, double s) const {
    if (!stable_ || ball_.dim != 1)
        throw UnsupportedModelDomain("poisson_at_distance: 1-d stable exterior law only");
    double xl = x[0] - ball_.center[0];
    double R = ball_.radius;
    double alpha = model_.jump.alpha;
    if (s <= 0.0) return INFINITY;
    double num = (R - xl) * (R + xl);      // R^2 - x^2, factored
    double den = s * (2.0 * R + s);        // z^2 - R^2, factored
    double dist_xz = side > 0 ? (R - xl) + s : (R + xl) + s;
    double C = std::tgamma(0.5) * std::pow(M_PI, -1.5) * std::sin(0.5 * M_PI * alpha);
    return C * std::pow(num / den, 0.5 * alpha) / dist_xz;
}

IntervalExitAtoms KernelSet::atoms(const Point& x) const {
    if (exit_kind_ != ExitLawKind::IntervalAtoms)
        throw UnsupportedModelDomain("exit law is not atomic for this model/domain");
    double l = ball_.center[0] - ball_.radius, r = ball_.center[0] + ball_.radius;
    double pr = (x[0] - l) / (r - l);
    return IntervalExitAtoms{l, r, 1.0 - pr, pr};
}

double KernelSet::mean_exit_time(const Point& x) const {
    Point xl = x - ball_.center;
    double x2 = xl.norm2();
    double R = ball_.radius;
    if (x2 >= R * R) return 0.0;
    if (stable_)
        return mean_exit_stable_ball(ball_.dim, model_.jump.alpha, model_.jump.scale, R, x2);
    return (R * R - x2) / (ball_.dim * model_.sigma2);
}

}  // namespace hslab
