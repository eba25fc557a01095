#ifndef HSLAB_HARMONIC_HPP
#define HSLAB_HARMONIC_HPP

#include <functional>
#include <string>
#include <vector>

#include "hslab/kernels.hpp"

namespace hslab {

enum class GrowthTag { Bounded, Linear, Power };

enum class HarmonicCertificate { Constant, Affine, PoissonExtension, ExplicitVerified };

// Function on all of R^d with a declared reason to be harmonic for its model.
// kinks / support data feed singularity registration and tail handling in the
// quadrature pathway.
struct HarmonicFunction {
    std::function<double(const Point&)> value;
    std::function<Point(const Point&)> gradient;  // empty when not available
    HarmonicCertificate certificate = HarmonicCertificate::Constant;
    GrowthTag growth = GrowthTag::Bounded;
    double growth_exponent = 0.0;  // for GrowthTag::Power
    bool zero_outside_domain = false;  // singular-harmonic tag (vanishes off D)
    std::vector<double> kinks;         // d=1 non-smooth loci
    // value is identically far_value for |z - far_center| >= support_radius
    double support_radius = INFINITY;
    double far_center = 0.0;
    double far_value = 0.0;
    std::string label;

    double operator()(const Point& p) const { return value(p); }
    double at1(double x) const { return value(Point(x)); }
    bool has_gradient() const { return static_cast<bool>(gradient); }
};

HarmonicFunction constant_function(double c, int dim);
// c0 + (slope, x); harmonic for every symmetric model in the catalog
HarmonicFunction affine_function(double c0, const Point& slope);

// exterior data for the nonlocal Poisson extension: piecewise-constant
// windows on D^c (d = 1)
struct DataWindow {
    double a, b;  // a < b
    double value;
};

// u(x) = E_x f(X_{tau_D}): boundary interpolation for 1-d diffusions,
// exterior-window integral against the stable Poisson kernel. When
// `singular` the function is forced to 0 outside D (only meaningful for
// local models where exterior values do not matter).
HarmonicFunction poisson_extension_brownian_interval(const DomainGeometry& D, double f_left,
                                                     double f_right, bool singular = false);
HarmonicFunction poisson_extension_stable(const OperatorModel& model, const DomainGeometry& D,
                                          std::vector<DataWindow> windows);

// Singular harmonics of the stable interval with closed forms
// (Martin-kernel combinations): h > 0 on D, h = 0 outside.
HarmonicFunction martin_symmetric_stable(const OperatorModel& model, const DomainGeometry& D);
HarmonicFunction martin_onesided_stable(const OperatorModel& model, const DomainGeometry& D);

// (a grad u, grad u)(z); 0 for pure-jump models
double energy_density(const OperatorModel& model, const HarmonicFunction& u, const Point& z);

// sign changes of z -> u(z) on [a,b], bisected to ~1e-13 (singularity
// registration for curvature densities and |.|-type Bregman kinks)
std::vector<double> find_zeros_1d(const std::function<double(double)>& f, double a, double b,
                                  int grid = 512);

}  // namespace hslab

#endif
