#ifndef HSLAB_QUADRATURE_HPP
#define HSLAB_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "hslab/common.hpp"

namespace hslab {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
    std::vector<double> singular_points;  // registered loci that were honored

    QuadratureResult& operator+=(const QuadratureResult& o) {
        value += o.value;
        error_estimate += o.error_estimate;
        subdivisions += o.subdivisions;
        singular_points.insert(singular_points.end(), o.singular_points.begin(),
                               o.singular_points.end());
        return *this;
    }
    QuadratureResult scaled(double c) const {
        QuadratureResult r = *this;
        r.value *= c;
        r.error_estimate *= std::abs(c);
        return r;
    }
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
    bool throw_on_max = true;
};

using Integrand = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod 15(7) on [a,b]. Registered singular points
// become panel boundaries (nodes are interior, so integrable endpoint
// singularities are never evaluated on their locus).
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts = {},
                           std::vector<double> singular_points = {});

// int_A^infinity f, A > 0 assumed after the caller's shift; implemented by
// the exact substitution z = A/t, t in (0,1], no truncation involved.
QuadratureResult integrate_right_tail(const Integrand& f, double A,
                                      const QuadratureOptions& opts = {});

}  // namespace hslab

#endif
