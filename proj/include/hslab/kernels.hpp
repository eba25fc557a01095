#ifndef HSLAB_KERNELS_HPP
#define HSLAB_KERNELS_HPP

#include <optional>
#include <string>

#include "hslab/geometry.hpp"
#include "hslab/models.hpp"

namespace hslab {

// profile integral of the stable ball Green function:
// int_0^z0 s^{alpha/2 - 1} (1+s)^{-d/2} ds, evaluated by series + fixed panels
// (relative accuracy ~1e-13 over the whole z0 range)
double bgr_profile(int d, double alpha, double z0);

// How a process leaves a bounded set: through two boundary atoms (1-d
// diffusion), through a surface density (diffusion, d >= 2), or by a jump
// into the exterior (volume density).
enum class ExitLawKind { IntervalAtoms, SurfaceDensity, ExteriorDensity };

struct IntervalExitAtoms {
    double left_point, right_point;
    double p_left, p_right;
};

// Closed-form Green function, Poisson kernel and exit-time moments for the
// supported (model, domain) pairs:
//   - pure diffusion on Interval / Ball(d<=3)
//   - StableRadial (a = 0) on Interval / Ball (the 1-d interval is the 1-d
//     ball; in d >= 2 everything is evaluated, but exterior integrals are
//     rotationally reducible only from the center)
// Everything else throws UnsupportedModelDomain; Monte Carlo occupation
// estimates are the fallback for those models.
class KernelSet {
  public:
    KernelSet(const OperatorModel& model, const DomainGeometry& domain);

    static bool available(const OperatorModel& model, const DomainGeometry& domain);
    static std::string unavailable_reason(const OperatorModel& model,
                                          const DomainGeometry& domain);

    double green(const Point& x, const Point& y) const;
    // exterior/surface Poisson density (throws for IntervalAtoms; use atoms())
    double poisson(const Point& x, const Point& z) const;
    // d = 1 exterior density at boundary distance s >= 0 on the given side
    // (+1 right, -1 left); the (z^2 - R^2) factor is computed in the factored
    // form s (2R + s), so the boundary singularity keeps full precision
    double poisson_at_distance(const Point& x, int side, double s) const;
    ExitLawKind exit_law_kind() const { return exit_kind_; }
    IntervalExitAtoms atoms(const Point& x) const;
    double mean_exit_time(const Point& x) const;

    const OperatorModel& model() const { return model_; }
    const DomainGeometry& domain() const { return domain_; }
    // domain normalized to a ball; for intervals this is the centered form
    const DomainGeometry& ball() const { return ball_; }

  private:
    OperatorModel model_;
    DomainGeometry domain_;
    DomainGeometry ball_;
    ExitLawKind exit_kind_;
    bool stable_ = false;
};

}  // namespace hslab

#endif
