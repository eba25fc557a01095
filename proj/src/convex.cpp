#include "hslab/convex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hslab/common.hpp"

namespace hslab {

ConvexSpec ConvexSpec::power(double p) {
    if (!(p > 1.0)) throw ValidationError("ConvexSpec::power requires p > 1");
    ConvexSpec s;
    s.kind_ = ConvexKind::PowerP;
    s.p_ = p;
    return s;
}

ConvexSpec ConvexSpec::abs_value() {
    ConvexSpec s;
    s.kind_ = ConvexKind::AbsValue;
    return s;
}

ConvexSpec ConvexSpec::piecewise(std::vector<double> breakpoints,
                                 std::vector<QuadraticPiece> pieces) {
    if (pieces.size() != breakpoints.size() + 1)
        throw ValidationError("piecewise convex: need breakpoints.size()+1 pieces");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
        throw ValidationError("piecewise convex: breakpoints must be sorted");
    for (size_t i = 1; i < breakpoints.size(); ++i)
        if (breakpoints[i] == breakpoints[i - 1])
            throw ValidationError("piecewise convex: duplicate breakpoint");
    for (const auto& pc : pieces)
        if (pc.c2 < 0.0) throw ValidationError("piecewise convex: negative curvature piece");
    for (size_t i = 0; i < breakpoints.size(); ++i) {
        double b = breakpoints[i];
        double vl = pieces[i].value(b), vr = pieces[i + 1].value(b);
        if (std::abs(vl - vr) > 1e-12 * (1.0 + std::abs(vl)))
            throw ValidationError("piecewise convex: discontinuous at breakpoint");
        if (pieces[i + 1].derivative(b) < pieces[i].derivative(b) - 1e-12)
            throw ValidationError("piecewise convex: derivative decreases at breakpoint");
    }
    ConvexSpec s;
    s.kind_ = ConvexKind::PiecewiseLinearQuadratic;
    s.breaks_ = std::move(breakpoints);
    s.pieces_ = std::move(pieces);
    // nonnegativity spot check on a wide grid
    for (int i = -400; i <= 400; ++i) {
        double x = i * 0.05;
        if (s.value(x) < -1e-12) throw ValidationError("piecewise convex: phi < 0");
    }
    return s;
}

size_t ConvexSpec::piece_left_of(double x) const {
    // number of breakpoints strictly below x; at a breakpoint this selects
    // the piece to its left, which is what left limits need
    return static_cast<size_t>(
        std::lower_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin());
}

double ConvexSpec::value(double x) const {
    switch (kind_) {
        case ConvexKind::PowerP:
            return std::pow(std::abs(x), p_);
        case ConvexKind::AbsValue:
            return std::abs(x);
        case ConvexKind::PiecewiseLinearQuadratic:
            return pieces_[piece_left_of(x)].value(x);
    }
    return 0.0;
}

double ConvexSpec::left_derivative(double x) const {
    switch (kind_) {
        case ConvexKind::PowerP: {
            if (x == 0.0) return 0.0;  // |x|^p with p>1 is differentiable at 0
            return p_ * sgn_left(x) * std::pow(std::abs(x), p_ - 1.0);
        }
        case ConvexKind::AbsValue:
            return sgn_left(x);  // -1 at x = 0
        case ConvexKind::PiecewiseLinearQuadratic:
            return pieces_[piece_left_of(x)].derivative(x);
    }
    return 0.0;
}

double ConvexSpec::bregman(double a, double b) const {
    double f = value(b) - value(a) - left_derivative(a) * (b - a);
    // exact algebra gives f >= 0; clamp tiny negative round-off
    return f < 0.0 && f > -1e-13 ? 0.0 : f;
}

CurvatureMeasure ConvexSpec::curvature_measure() const {
    CurvatureMeasure m;
    switch (kind_) {
        case ConvexKind::PowerP: {
            double p = p_;
            m.density = [p](double x) {
                if (x == 0.0) return 0.0;
                return p * (p - 1.0) * std::pow(std::abs(x), p - 2.0);
            };
            break;
        }
        case ConvexKind::AbsValue:
            m.density = [](double) { return 0.0; };
            m.atoms.push_back({0.0, 2.0});
            break;
        case ConvexKind::PiecewiseLinearQuadratic: {
            auto breaks = breaks_;
            auto pieces = pieces_;
            m.density = [breaks, pieces](double x) {
                size_t k = static_cast<size_t>(
                    std::lower_bound(breaks.begin(), breaks.end(), x) - breaks.begin());
                return 2.0 * pieces[k].c2;
            };
            for (size_t i = 0; i < breaks_.size(); ++i) {
                double b = breaks_[i];
                double jump = pieces_[i + 1].derivative(b) - pieces_[i].derivative(b);
                if (jump > 0.0) m.atoms.push_back({b, jump});
            }
            break;
        }
    }
    return m;
}

bool ConvexSpec::has_atoms() const {
    if (kind_ == ConvexKind::AbsValue) return true;
    if (kind_ == ConvexKind::PiecewiseLinearQuadratic) return !curvature_measure().atoms.empty();
    return false;
}

std::string ConvexSpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case ConvexKind::PowerP: os << "power(p=" << p_ << ")"; break;
        case ConvexKind::AbsValue: os << "abs"; break;
        case ConvexKind::PiecewiseLinearQuadratic:
            os << "piecewise(" << pieces_.size() << " pieces)";
            break;
    }
    return os.str();
}

std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

}  // namespace hslab
