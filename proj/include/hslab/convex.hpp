#ifndef HSLAB_CONVEX_HPP
#define HSLAB_CONVEX_HPP

#include <functional>
#include <string>
#include <vector>

namespace hslab {

enum class ConvexKind { PowerP, AbsValue, PiecewiseLinearQuadratic };

struct CurvatureAtom {
    double location;
    double mass;  // > 0
};

// Distributional second derivative of a convex function: an absolutely
// continuous part (density, evaluated off the atoms) plus finitely many atoms.
struct CurvatureMeasure {
    std::function<double(double)> density;
    std::vector<CurvatureAtom> atoms;
    bool has_atoms() const { return !atoms.empty(); }
};

// One quadratic piece c0 + c1*x + c2*x^2; pieces tile the line between
// consecutive breakpoints.
struct QuadraticPiece {
    double c0 = 0, c1 = 0, c2 = 0;
    double value(double x) const { return c0 + x * (c1 + x * c2); }
    double derivative(double x) const { return c1 + 2.0 * c2 * x; }
};

// Nonnegative convex function phi: R -> [0,inf) with its left derivative and
// curvature measure. Immutable after construction; cheap to copy.
class ConvexSpec {
  public:
    static ConvexSpec power(double p);     // phi(x) = |x|^p, p > 1
    static ConvexSpec abs_value();         // phi(x) = |x|
    // breakpoints strictly increasing; pieces.size() == breakpoints.size()+1;
    // validated for continuity, convexity and nonnegativity.
    static ConvexSpec piecewise(std::vector<double> breakpoints,
                                std::vector<QuadraticPiece> pieces);

    ConvexKind kind() const { return kind_; }
    double p() const { return p_; }

    double value(double x) const;            // phi(x)
    double operator()(double x) const { return value(x); }
    double left_derivative(double x) const;  // phi'_-(x)
    // F(a,b) = phi(b) - phi(a) - phi'_-(a) (b - a), always >= 0
    double bregman(double a, double b) const;
    CurvatureMeasure curvature_measure() const;
    bool has_atoms() const;

    std::string describe() const;

  private:
    ConvexSpec() = default;
    ConvexKind kind_ = ConvexKind::PowerP;
    double p_ = 2.0;
    std::vector<double> breaks_;
    std::vector<QuadraticPiece> pieces_;
    size_t piece_left_of(double x) const;  // index of the piece owning left limits at x
};

}  // namespace hslab

#endif
