#ifndef HSLAB_TERMS_HPP
#define HSLAB_TERMS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "hslab/convex.hpp"
#include "hslab/harmonic.hpp"
#include "hslab/kernels.hpp"
#include "hslab/quadrature.hpp"

namespace hslab {

// Scalar function on R (d = 1 pathway currency) with the metadata the
// adaptive integrators need: non-smooth loci, eventual constancy, growth.
struct Profile1D {
    std::function<double(double)> f;
    std::vector<double> kinks;
    double support_radius = INFINITY;  // |z - far_center| >= support => f == far_value
    double far_center = 0.0;
    double far_value = 0.0;
    double growth_exponent = 0.0;  // 0 bounded, 1 linear, q for |z|^q
};

Profile1D make_profile(const HarmonicFunction& u);
// (u/h) 1_D with 0 outside D; evaluation never divides by a vanishing h
Profile1D make_ratio_profile(const HarmonicFunction& u, const HarmonicFunction& h,
                             const DomainGeometry& D);
// h 1_D (conditional weight)
Profile1D make_weight_profile(const HarmonicFunction& h, const DomainGeometry& D);

struct TermOptions {
    QuadratureOptions outer{1e-11, 1e-10, 4000, true};
    // inner integrals near level crossings legitimately blow up and carry
    // evaluation noise; they return best-effort values and their error
    // estimates propagate into the enclosing potential
    QuadratureOptions inner{1e-12, 1e-10, 800, false};
    double delta_split = 0.25;  // seed split radius around the moving singularity
    double phi_growth_override = -1.0;
};

double phi_growth_exponent(const ConvexSpec& spec);

// int_U G_U(x,z) rho(z) dz, diagonal singularity registered at z = x.
// d >= 2 supports the rotationally reducible case x = center with radial rho
// via rho_radial.
QuadratureResult green_integral(const KernelSet& ks, const Point& x,
                                const std::function<double(const Point&)>& rho,
                                std::vector<double> singular_points = {},
                                const TermOptions& opts = {});

// Psi(z) = int F(w(z), w(y)) weight(y) nu(|y-z|) dy over y in R, i.e. the
// inner Bregman integral against the jump intensity (2J). `bregman` is any
// divergence F(a,b) >= 0 built from a convex function (ConvexSpec::bregman or
// the shifted-absolute-value used by the local-time characterization).
using BregmanFn = std::function<double(double, double)>;

// divergence plus the data the near-field needs: the curvature density g
// drives the quadratic Taylor closed form below the offset cutoff (null for
// purely atomic curvatures, whose divergence vanishes off the kink levels),
// and kink_levels are the values of w at which F(a, .) loses smoothness
struct BregmanKernel {
    BregmanFn F;
    std::function<double(double)> curvature_density;  // may be null
    std::vector<double> kink_levels;
};

QuadratureResult bregman_jump_profile(const OperatorModel& model, double z, const Profile1D& w,
                                      const BregmanKernel& kernel, const Profile1D* weight,
                                      const TermOptions& opts = {});

// 2 int_U G_U(x,z) int F_phi(u(z),u(y)) [h(y)] J(dz,dy): the nonlocal term of
// the identities; equals the Green integral of bregman_jump_profile
QuadratureResult jump_term(const KernelSet& ks, const Point& x, const Profile1D& w,
                           const ConvexSpec& spec, const Profile1D* weight = nullptr,
                           const TermOptions& opts = {});

// int_U G_U(x,z) F_phi(u(z), 0) kappa(z) dz
QuadratureResult killing_term(const KernelSet& ks, const Point& x, const Profile1D& w,
                              const ConvexSpec& spec, const TermOptions& opts = {});

// int_{U^c} f(z) P_U(x,dz) with optional multiplicative weight profile; f is
// given on exit space (d=1: scalar argument)
QuadratureResult exit_integral(const KernelSet& ks, const Point& x, const Profile1D& f,
                               const TermOptions& opts = {});

// int_{boundary sphere} f(z) P_U(x,dz) for diffusions in d in {2,3}
QuadratureResult exit_integral_sphere(const KernelSet& ks, const Point& x,
                                      const std::function<double(const Point&)>& f,
                                      const TermOptions& opts = {});

// RHS of the potential characterization of the level-a local-time measure:
// int |u(z)-a| P_U(x,dz) - |u(x)-a| - int G_U(x,z) j_a(z) dz
QuadratureResult local_time_characterization_rhs(const KernelSet& ks, const Point& x,
                                                 const HarmonicFunction& u, double level,
                                                 const TermOptions& opts = {});

// Poisson extension of growth-tagged exterior data for the stable interval;
// throws DivergentBoundaryIntegral when the tag is inadmissible for alpha
HarmonicFunction harmonic_from_exterior_function(const OperatorModel& model,
                                                 const DomainGeometry& D,
                                                 std::function<double(double)> f,
                                                 GrowthTag growth, double growth_exponent,
                                                 std::vector<double> kinks = {});

}  // namespace hslab

#endif
