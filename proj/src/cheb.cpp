#include "hslab/cheb.hpp"

#include <algorithm>
#include <cmath>

namespace hslab {

Cheb1 Cheb1::fit(const std::function<double(double)>& f, double a, double b, int n) {
    Cheb1 c;
    c.a_ = a;
    c.b_ = b;
    std::vector<double> fv(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        double th = M_PI * (k + 0.5) / n;
        double x = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(th);
        fv[static_cast<size_t>(k)] = f(x);
    }
    c.coef_.assign(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += fv[static_cast<size_t>(k)] * std::cos(M_PI * j * (k + 0.5) / n);
        c.coef_[static_cast<size_t>(j)] = 2.0 * s / n;
    }
    c.coef_[0] *= 0.5;
    return c;
}

double Cheb1::eval(double x) const {
    double t = (2.0 * x - a_ - b_) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (size_t j = coef_.size(); j-- > 1;) {
        double tmp = 2.0 * t * b1 - b2 + coef_[j];
        b2 = b1;
        b1 = tmp;
    }
    return t * b1 - b2 + coef_[0];
}

PiecewiseCheb PiecewiseCheb::build(const std::function<double(double)>& f, double lo, double hi,
                                   int grade_levels, int degree) {
    PiecewiseCheb pc;
    pc.fallback_ = f;
    double span = hi - lo;
    // central block plus dyadically graded rims; the extreme slivers fall
    // back to direct evaluation
    double rim = 0.1 * span;
    double c0 = lo + rim, c1 = hi - rim;
    std::vector<std::pair<double, double>> segs;
    segs.push_back({c0, c1});
    double left_edge = c0, right_edge = c1;
    double w = rim;
    for (int l = 0; l < grade_levels; ++l) {
        w *= 0.5;
        segs.push_back({left_edge - w, left_edge});
        segs.push_back({right_edge, right_edge + w});
        left_edge -= w;
        right_edge += w;
    }
    pc.inner_lo_ = left_edge;
    pc.inner_hi_ = right_edge;
    std::sort(segs.begin(), segs.end());
    for (auto& s : segs) {
        pc.edges_.push_back(s.first);
        pc.pieces_.push_back(Cheb1::fit(f, s.first, s.second, degree));
    }
    pc.edges_.push_back(segs.back().second);
    return pc;
}

double PiecewiseCheb::eval(double x) const {
    if (x <= inner_lo_ || x >= inner_hi_) return fallback_(x);
    size_t k = static_cast<size_t>(
        std::upper_bound(edges_.begin(), edges_.end(), x) - edges_.begin());
    if (k == 0 || k >= edges_.size()) return fallback_(x);
    return pieces_[k - 1].eval(x);
}

}  // namespace hslab
