#ifndef HSLAB_MODELS_HPP
#define HSLAB_MODELS_HPP

#include <functional>
#include <string>

#include "hslab/common.hpp"
#include "hslab/geometry.hpp"

namespace hslab {

// Normalization conventions (docs/conventions.md is the narrative version):
//  * The Dirichlet form is E(u,v) = 1/2 int (a grad u, grad v) dx
//                                 + int int (u(x)-u(y))(v(x)-v(y)) J(x,y) dx dy
//                                 + int u v kappa dx.
//  * The associated process has generator 1/2 div(a grad .) for the local
//    part and jump intensity N(x,dy) = 2 J(x,y) dy. For a Levy model the
//    intensity is the Levy measure: nu(h) = 2 J(x, x+h).
//  * StableRadial with scale 1 means nu(h) = A(d,alpha) |h|^{-d-alpha}, the
//    Levy measure of the process generated by -(-Delta)^{alpha/2}.

enum class JumpKind { None, StableRadial, RadialLevy, VariableStableLike };

struct JumpSpec {
    JumpKind kind = JumpKind::None;
    double alpha = 1.0;      // stable index, in (0,2)
    double scale = 1.0;      // multiplier on the standard intensity
    double tempering = 0.0;  // RadialLevy: exp(-tempering * r) factor
    // VariableStableLike: symmetric c(x,y) with C^-1 <= c <= C; J(x,y) =
    // c(x,y)|x-y|^{-d-alpha}; quadrature-only (no sampler).
    std::function<double(const Point&, const Point&)> cxy;
    double cxy_bound = 1.0;
};

struct OperatorModel {
    int dim = 1;
    // constant symmetric PSD diffusion matrix a, row-major d x d; the catalog
    // uses sigma2 * I which is what the factories below produce
    std::array<double, 9> a{};
    bool isotropic_diffusion = true;
    double sigma2 = 0.0;  // isotropic shortcut: a = sigma2 * I
    JumpSpec jump;
    std::function<double(const Point&)> killing;  // nullptr => kappa = 0

    static OperatorModel brownian(double sigma2, int dim = 1);
    static OperatorModel stable(double alpha, int dim = 1, double scale = 1.0);
    static OperatorModel mixed(double sigma2, double alpha, int dim = 1,
                               double jump_scale = 1.0);
    static OperatorModel radial_levy(double alpha, double tempering, double scale = 1.0,
                                     int dim = 1);
    static OperatorModel stable_like(double alpha,
                                     std::function<double(const Point&, const Point&)> cxy,
                                     double bound, int dim = 1);

    bool has_diffusion() const { return sigma2 > 0.0; }
    bool has_jumps() const { return jump.kind != JumpKind::None; }
    bool pure_jump() const { return !has_diffusion() && has_jumps(); }
    bool has_killing() const { return static_cast<bool>(killing); }
    bool simulable() const;

    // radial Levy intensity nu(r), r > 0 (None/VariableStableLike: throws)
    double levy_density(double r) const;
    // jump intensity N(x, y) density: 2 J(x,y)
    double jump_intensity(const Point& x, const Point& y) const;
    // Beurling-Deny jump kernel J(x,y) = intensity / 2
    double jump_kernel(const Point& x, const Point& y) const;
    // integral of nu over |h| > R (d = 1)
    double levy_tail_mass(double R) const;
    // integral of h^2 nu(h) over |h| <= delta (d = 1)
    double levy_truncated_variance(double delta) const;
    double kappa(const Point& z) const { return killing ? killing(z) : 0.0; }

    std::string describe() const;
};

// Levy-measure constant of -(-Delta)^{alpha/2}:
// A(d,alpha) = 2^alpha Gamma((d+alpha)/2) / (pi^{d/2} |Gamma(-alpha/2)|)
double stable_levy_constant(int d, double alpha);

}  // namespace hslab

#endif
