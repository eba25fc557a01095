#ifndef HSLAB_COMMON_HPP
#define HSLAB_COMMON_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hslab {

// Point in R^d, d <= 3. Hot loops in d=1 use plain doubles; this type is the
// interface currency for geometry, kernels and harmonic functions.
struct Point {
    std::array<double, 3> v{0.0, 0.0, 0.0};
    int dim = 1;

    Point() = default;
    explicit Point(double x) : v{x, 0.0, 0.0}, dim(1) {}
    Point(double x, double y) : v{x, y, 0.0}, dim(2) {}
    Point(double x, double y, double z) : v{x, y, z}, dim(3) {}

    double& operator[](int i) { return v[static_cast<size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<size_t>(i)]; }
    double x() const { return v[0]; }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < dim; ++i) s += v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }
};

inline Point operator+(Point a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) a[i] += b[i];
    return a;
}
inline Point operator-(Point a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) a[i] -= b[i];
    return a;
}
inline Point operator*(double c, Point a) {
    for (int i = 0; i < a.dim; ++i) a[i] *= c;
    return a;
}
inline double dot(const Point& a, const Point& b) {
    double s = 0;
    for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
    return s;
}
inline double dist(const Point& a, const Point& b) { return (a - b).norm(); }

// Error taxonomy. Every failure mode the library reports deliberately gets
// its own type so callers (and the CLI exit-code mapping) can tell apart
// configuration problems, unsupported requests and genuine numerical trouble.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct ComputationError : Error { using Error::Error; };

struct UnsupportedModelDomain : ComputationError { using ComputationError::ComputationError; };
struct UnsupportedModel : ComputationError { using ComputationError::ComputationError; };
struct MaxSubdivisions : ComputationError { using ComputationError::ComputationError; };
struct TailDivergence : ComputationError { using ComputationError::ComputationError; };
struct NonIntegrableDetected : ComputationError { using ComputationError::ComputationError; };
struct DegenerateWeights : ComputationError { using ComputationError::ComputationError; };
struct DivergentBoundaryIntegral : ComputationError { using ComputationError::ComputationError; };
struct IncompatibleSpec : ComputationError { using ComputationError::ComputationError; };

inline double sgn_left(double x) { return x > 0.0 ? 1.0 : -1.0; }

// FNV-1a, used to fingerprint configurations in reports.
inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(uint64_t v);

}  // namespace hslab

#endif
