#include "hslab/models.hpp"

#include <cmath>
#include <sstream>

namespace hslab {

double stable_levy_constant(int d, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw ValidationError("stable: alpha in (0,2)");
    // |Gamma(-alpha/2)| = (2/alpha) Gamma(1 - alpha/2)
    double num = std::pow(2.0, alpha - 1.0) * alpha * std::tgamma(0.5 * (d + alpha));
    double den = std::pow(M_PI, 0.5 * d) * std::tgamma(1.0 - 0.5 * alpha);
    return num / den;
}

OperatorModel OperatorModel::brownian(double sigma2, int dim) {
    if (!(sigma2 > 0.0)) throw ValidationError("brownian: sigma2 > 0");
    OperatorModel m;
    m.dim = dim;
    m.sigma2 = sigma2;
    for (int i = 0; i < dim; ++i) m.a[static_cast<size_t>(i * dim + i)] = sigma2;
    return m;
}

OperatorModel OperatorModel::stable(double alpha, int dim, double scale) {
    OperatorModel m;
    m.dim = dim;
    m.jump.kind = JumpKind::StableRadial;
    m.jump.alpha = alpha;
    m.jump.scale = scale;
    (void)stable_levy_constant(dim, alpha);  // validates alpha
    return m;
}

OperatorModel OperatorModel::mixed(double sigma2, double alpha, int dim, double jump_scale) {
    OperatorModel m = brownian(sigma2, dim);
    m.jump.kind = JumpKind::StableRadial;
    m.jump.alpha = alpha;
    m.jump.scale = jump_scale;
    (void)stable_levy_constant(dim, alpha);
    return m;
}

OperatorModel OperatorModel::radial_levy(double alpha, double tempering, double scale, int dim) {
    if (!(tempering >= 0.0)) throw ValidationError("radial_levy: tempering >= 0");
    OperatorModel m;
    m.dim = dim;
    m.jump.kind = JumpKind::RadialLevy;
    m.jump.alpha = alpha;
    m.jump.scale = scale;
    m.jump.tempering = tempering;
    (void)stable_levy_constant(dim, alpha);
    return m;
}

OperatorModel OperatorModel::stable_like(double alpha,
                                         std::function<double(const Point&, const Point&)> cxy,
                                         double bound, int dim) {
    if (!cxy) throw ValidationError("stable_like: c(x,y) required");
    if (!(bound >= 1.0)) throw ValidationError("stable_like: bound C >= 1");
    OperatorModel m;
    m.dim = dim;
    m.jump.kind = JumpKind::VariableStableLike;
    m.jump.alpha = alpha;
    m.jump.cxy = std::move(cxy);
    m.jump.cxy_bound = bound;
    (void)stable_levy_constant(dim, alpha);
    return m;
}

bool OperatorModel::simulable() const {
    if (has_killing()) return false;
    if (jump.kind == JumpKind::VariableStableLike) return false;
    return true;
}

double OperatorModel::levy_density(double r) const {
    switch (jump.kind) {
        case JumpKind::None:
            return 0.0;
        case JumpKind::StableRadial:
            return jump.scale * stable_levy_constant(dim, jump.alpha) *
                   std::pow(r, -(dim + jump.alpha));
        case JumpKind::RadialLevy:
            return jump.scale * stable_levy_constant(dim, jump.alpha) *
                   std::pow(r, -(dim + jump.alpha)) * std::exp(-jump.tempering * r);
        case JumpKind::VariableStableLike:
            throw UnsupportedModel("variable stable-like kernel is not radial");
    }
    return 0.0;
}

double OperatorModel::jump_intensity(const Point& x, const Point& y) const {
    if (jump.kind == JumpKind::None) return 0.0;
    double r = dist(x, y);
    if (r <= 0.0) return 0.0;
    if (jump.kind == JumpKind::VariableStableLike)
        return 2.0 * jump.cxy(x, y) * std::pow(r, -(dim + jump.alpha));
    return levy_density(r);
}

double OperatorModel::jump_kernel(const Point& x, const Point& y) const {
    return 0.5 * jump_intensity(x, y);
}

double OperatorModel::levy_tail_mass(double R) const {
    if (dim != 1) throw UnsupportedModel("levy_tail_mass: d = 1 only");
    if (jump.kind == JumpKind::None) return 0.0;
    double A = jump.scale * stable_levy_constant(1, jump.alpha);
    double alpha = jump.alpha;
    if (jump.kind == JumpKind::StableRadial) return 2.0 * A * std::pow(R, -alpha) / alpha;
    if (jump.kind == JumpKind::RadialLevy) {
        // 2A int_R^inf r^{-1-alpha} e^{-lam r} dr, by series-free composite
        // Simpson on r = R e^t, enough for the accuracy this feeds (sampler
        // rates and tail bounds)
        double lam = jump.tempering;
        if (lam == 0.0) return 2.0 * A * std::pow(R, -alpha) / alpha;
        double sum = 0.0;
        int n = 2000;
        double tmax = std::log(1e4 / (lam * R) + 2.0);
        double dt = tmax / n;
        for (int i = 0; i <= n; ++i) {
            double t = i * dt;
            double r = R * std::exp(t);
            double f = std::pow(r, -alpha) * std::exp(-lam * r);  // r * integrand
            double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            sum += w * f;
        }
        return 2.0 * A * sum * dt / 3.0;
    }
    throw UnsupportedModel("levy_tail_mass: radial kernels only");
}

double OperatorModel::levy_truncated_variance(double delta) const {
    if (dim != 1) throw UnsupportedModel("levy_truncated_variance: d = 1 only");
    if (jump.kind == JumpKind::None) return 0.0;
    double A = jump.scale * stable_levy_constant(1, jump.alpha);
    double alpha = jump.alpha;
    if (jump.kind == JumpKind::StableRadial)
        return 2.0 * A * std::pow(delta, 2.0 - alpha) / (2.0 - alpha);
    if (jump.kind == JumpKind::RadialLevy) {
        double lam = jump.tempering;
        if (lam == 0.0) return 2.0 * A * std::pow(delta, 2.0 - alpha) / (2.0 - alpha);
        double sum = 0.0;
        int n = 2000;
        double dr = delta / n;
        for (int i = 1; i <= n; ++i) {  // integrand -> 0 at r = 0
            double r = i * dr;
            double f = std::pow(r, 1.0 - alpha) * std::exp(-lam * r);
            double w = (i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            sum += w * f;
        }
        return 2.0 * A * sum * dr / 3.0;
    }
    throw UnsupportedModel("levy_truncated_variance: radial kernels only");
}

std::string OperatorModel::describe() const {
    std::ostringstream os;
    if (has_diffusion()) os << "diffusion(sigma2=" << sigma2 << ")";
    if (has_jumps()) {
        if (has_diffusion()) os << "+";
        switch (jump.kind) {
            case JumpKind::StableRadial: os << "stable(alpha=" << jump.alpha << ")"; break;
            case JumpKind::RadialLevy:
                os << "radial_levy(alpha=" << jump.alpha << ",tempering=" << jump.tempering
                   << ")";
                break;
            case JumpKind::VariableStableLike:
                os << "stable_like(alpha=" << jump.alpha << ")";
                break;
            default: break;
        }
    }
    if (has_killing()) os << "+killing";
    os << " d=" << dim;
    return os.str();
}

}  // namespace hslab
