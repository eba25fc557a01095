#include "hslab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hslab {

DomainGeometry DomainGeometry::interval(double l, double r) {
    if (!(l < r)) throw ValidationError("interval: require l < r");
    DomainGeometry g;
    g.shape = Shape::Interval;
    g.dim = 1;
    g.left = l;
    g.right = r;
    return g;
}

DomainGeometry DomainGeometry::ball(const Point& center, double radius) {
    if (!(radius > 0.0)) throw ValidationError("ball: require radius > 0");
    DomainGeometry g;
    g.shape = Shape::Ball;
    g.dim = center.dim;
    g.center = center;
    g.radius = radius;
    return g;
}

DomainGeometry DomainGeometry::as_ball() const {
    if (shape == Shape::Ball) return *this;
    Point c(0.5 * (left + right));
    return ball(c, 0.5 * (right - left));
}

bool DomainGeometry::contains(const Point& p) const {
    if (shape == Shape::Interval) return p[0] > left && p[0] < right;
    return dist(p, center) < radius;
}

bool DomainGeometry::contains1(double x) const { return contains(Point(x)); }

double DomainGeometry::boundary_distance(const Point& p) const {
    if (shape == Shape::Interval) return std::min(p[0] - left, right - p[0]);
    return radius - dist(p, center);
}

double DomainGeometry::volume() const {
    if (shape == Shape::Interval) return right - left;
    switch (dim) {
        case 1: return 2.0 * radius;
        case 2: return M_PI * radius * radius;
        default: return 4.0 / 3.0 * M_PI * radius * radius * radius;
    }
}

DomainGeometry DomainGeometry::shrink(double factor) const {
    if (!(factor > 0.0 && factor <= 1.0)) throw ValidationError("shrink factor in (0,1]");
    if (shape == Shape::Interval) {
        double c = 0.5 * (left + right), h = 0.5 * (right - left) * factor;
        return interval(c - h, c + h);
    }
    return ball(center, radius * factor);
}

std::string DomainGeometry::describe() const {
    std::ostringstream os;
    if (shape == Shape::Interval)
        os << "interval(" << left << "," << right << ")";
    else {
        os << "ball(c=(";
        for (int i = 0; i < dim; ++i) os << (i ? "," : "") << center[i];
        os << "),r=" << radius << ",d=" << dim << ")";
    }
    return os.str();
}

double containment_margin(const DomainGeometry& U, const DomainGeometry& D) {
    if (U.dim != D.dim) return -1.0;
    DomainGeometry bu = U.as_ball(), bd = D.as_ball();
    return bd.radius - (dist(bu.center, bd.center) + bu.radius);
}

bool strictly_inside(const DomainGeometry& U, const DomainGeometry& D, double min_margin) {
    return containment_margin(U, D) > min_margin;
}

}  // namespace hslab
