#ifndef HSLAB_CHEB_HPP
#define HSLAB_CHEB_HPP

#include <functional>
#include <vector>

namespace hslab {

// Chebyshev interpolant on [a,b] (first-kind nodes, Clenshaw evaluation)
class Cheb1 {
  public:
    static Cheb1 fit(const std::function<double(double)>& f, double a, double b, int n);
    double eval(double x) const;
    double a() const { return a_; }
    double b() const { return b_; }

  private:
    double a_ = -1.0, b_ = 1.0;
    std::vector<double> coef_;
};

// Piecewise Chebyshev cache on [lo,hi] with dyadic grading toward both
// endpoints (for functions analytic inside but singular at the rim) and a
// direct-evaluation fallback on the extreme slivers and outside [lo,hi].
class PiecewiseCheb {
  public:
    static PiecewiseCheb build(const std::function<double(double)>& f, double lo, double hi,
                               int grade_levels = 9, int degree = 40);
    double eval(double x) const;

  private:
    std::vector<double> edges_;
    std::vector<Cheb1> pieces_;
    std::function<double(double)> fallback_;
    double inner_lo_ = 0.0, inner_hi_ = 0.0;
};

}  // namespace hslab

#endif
