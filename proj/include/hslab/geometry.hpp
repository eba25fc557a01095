#ifndef HSLAB_GEOMETRY_HPP
#define HSLAB_GEOMETRY_HPP

#include <string>

#include "hslab/common.hpp"

namespace hslab {

// Interval in d=1 or ball in d<=3. Intervals are kept distinct from 1-d balls
// in the description layer, but geometrically an interval is the ball with
// center (l+r)/2 and radius (r-l)/2; as_ball() performs that normalization.
struct DomainGeometry {
    enum class Shape { Interval, Ball };

    Shape shape = Shape::Interval;
    int dim = 1;
    double left = -1.0, right = 1.0;  // Interval
    Point center;                     // Ball
    double radius = 1.0;              // Ball

    static DomainGeometry interval(double l, double r);
    static DomainGeometry ball(const Point& center, double radius);

    DomainGeometry as_ball() const;

    bool contains(const Point& p) const;
    bool contains1(double x) const;  // d=1 convenience
    // distance from an interior point to the boundary (>= 0)
    double boundary_distance(const Point& p) const;
    double volume() const;
    // uniform shrink toward the center, factor in (0,1]
    DomainGeometry shrink(double factor) const;

    std::string describe() const;
};

// closure(U) inside D with a positive margin
bool strictly_inside(const DomainGeometry& U, const DomainGeometry& D,
                     double min_margin = 1e-12);
double containment_margin(const DomainGeometry& U, const DomainGeometry& D);

}  // namespace hslab

#endif
