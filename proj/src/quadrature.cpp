#include "hslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

namespace hslab {

namespace {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK QK15 constants)
const double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
    double value = 0.0;
    double error = 0.0;
};

PanelEstimate qk15(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        double v1 = f(c - h * kXgk[i]);
        double v2 = f(c + h * kXgk[i]);
        if (!std::isfinite(v1)) v1 = 0.0;
        if (!std::isfinite(v2)) v2 = 0.0;
        fv[i] = v1;
        fv[14 - i] = v2;
    }
    double vc = f(c);
    if (!std::isfinite(vc)) vc = 0.0;
    fv[7] = vc;

    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    double resabs = std::abs(resk);
    for (int i = 0; i < 7; ++i) {
        resk += kWgk[i] * (fv[i] + fv[14 - i]);
        resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
        if (i % 2 == 1) resg += kWg[i / 2] * (fv[i] + fv[14 - i]);
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
    resasc *= h;
    resabs *= h;

    PanelEstimate e;
    e.value = resk * h;
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = 50.0 * 2.220446049250313e-16;
    if (resabs > 1e-290) err = std::max(err, eps * resabs);
    e.error = err;
    return e;
}

// tanh-sinh rule: doubly-exponential node clustering makes integrable
// endpoint singularities (algebraic or logarithmic) converge at machine
// precision as long as the integrand is analytic inside the panel
PanelEstimate tanh_sinh(const Integrand& f, double a, double b) {
    const double w = 0.5 * (b - a);
    // the range must cover strong algebraic singularities s^{-beta} with
    // beta close to 1; nodes whose weight underflows terminate the sweep
    const double tmax = 6.8;
    double prev = 0.0, curr = 0.0;
    PanelEstimate e;
    // level 0: h = 0.5, refined levels add the odd nodes only
    for (int level = 0; level <= 3; ++level) {
        double h = 0.5 / (1 << level);
        double sum = 0.0;
        int stride = level == 0 ? 1 : 2;
        int start = level == 0 ? 0 : 1;
        for (int k = start;; k += stride) {
            double t = k * h;
            if (t > tmax) break;
            // offsets from the endpoints computed without cancellation:
            // 1 - tanh(T) = 2 / (1 + e^{2T}),  sech^2(T) = 4 e^{2T}/(1+e^{2T})^2
            double T2 = M_PI * std::sinh(t);  // 2T
            if (T2 > 700.0) break;            // off underflows; remaining terms vanish
            double E = std::exp(T2);
            double off = 2.0 / (1.0 + E);
            double sech2 = E * off * off;
            double weight = 0.5 * M_PI * std::cosh(t) * sech2;
            if (weight < 1e-300) break;
            double fp = f(b - w * off);
            double fm = k == 0 ? fp : f(a + w * off);
            if (!std::isfinite(fp)) fp = 0.0;
            if (!std::isfinite(fm)) fm = 0.0;
            sum += weight * (k == 0 ? fp : fp + fm);
        }
        curr = (level == 0 ? sum * h : 0.5 * prev + sum * h);
        if (level > 0) e.error = std::abs(curr - prev);
        prev = curr;
    }
    e.value = curr * w;
    e.error = std::max(e.error * std::abs(w), 1e-16 * std::abs(e.value));
    return e;
}

struct Panel {
    double a, b;
    PanelEstimate est;
    // 0: plain; 1: singular at the left edge; 2: singular at the right edge
    int sing = 0;
    bool operator<(const Panel& o) const { return est.error < o.est.error; }
};

PanelEstimate estimate_panel(const Integrand& f, double a, double b, int sing) {
    return sing == 0 ? qk15(f, a, b) : tanh_sinh(f, a, b);
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts, std::vector<double> singular_points) {
    QuadratureResult out;
    if (a == b) return out;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::sort(singular_points.begin(), singular_points.end());
    const double edge_tol = 1e-14 * (std::abs(a) + std::abs(b) + 1.0);
    bool sing_at_a = false, sing_at_b = false;
    std::vector<double> cuts{a};
    for (double s : singular_points) {
        if (std::abs(s - a) <= edge_tol) sing_at_a = true;
        if (std::abs(s - b) <= edge_tol) sing_at_b = true;
        if (s > cuts.back() + edge_tol && s < b - edge_tol) {
            cuts.push_back(s);
            out.singular_points.push_back(s);
        }
    }
    cuts.push_back(b);
    if (sing_at_a) out.singular_points.push_back(a);
    if (sing_at_b) out.singular_points.push_back(b);

    std::priority_queue<Panel> heap;
    double total = 0.0, toterr = 0.0;
    size_t npanels = cuts.size() - 1;
    for (size_t i = 0; i < npanels; ++i) {
        // panels touching a registered singular locus get the
        // doubly-exponential rule; cuts are singular on both sides, the
        // domain endpoints only when explicitly registered
        int sing = 0;  // bitmask: 1 = left edge, 2 = right edge
        if (i > 0 || sing_at_a) sing |= 1;
        if (i + 1 < npanels || sing_at_b) sing |= 2;
        Panel p{cuts[i], cuts[i + 1], estimate_panel(f, cuts[i], cuts[i + 1], sing), sing};
        total += p.est.value;
        toterr += p.est.error;
        heap.push(p);
    }
    out.subdivisions = static_cast<int>(npanels);

    const double span = b - a;
    const double min_width = 1e-15 * std::max(span, 1.0) + 1e-305;
    int stuck = 0;
    while (toterr > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
           out.subdivisions < opts.max_subdivisions && !heap.empty()) {
        Panel worst = heap.top();
        heap.pop();
        if (worst.b - worst.a < min_width) {
            if (++stuck > 64) break;
            continue;
        }
        double mid = 0.5 * (worst.a + worst.b);
        // a split keeps the singular side doubly exponential and lets the
        // smooth side go back to Gauss-Kronrod
        int sl = worst.sing & 1;
        int sr = worst.sing & 2;
        Panel left{worst.a, mid, estimate_panel(f, worst.a, mid, sl), sl};
        Panel right{mid, worst.b, estimate_panel(f, mid, worst.b, sr), sr};
        total += left.est.value + right.est.value - worst.est.value;
        toterr += left.est.error + right.est.error - worst.est.error;
        heap.push(left);
        heap.push(right);
        ++out.subdivisions;
    }

    if (toterr > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
        out.subdivisions >= opts.max_subdivisions && opts.throw_on_max) {
        char buf[256];
        snprintf(buf, sizeof buf,
                 "adaptive quadrature: tolerance unreachable within %d panels on "
                 "[%.6g, %.6g] (value %.6g, error %.3g, target %.3g)",
                 opts.max_subdivisions, a, b, total, toterr,
                 std::max(opts.abs_tol, opts.rel_tol * std::abs(total)));
        throw MaxSubdivisions(buf);
    }

    out.value = sign * total;
    out.error_estimate = std::max(toterr, 0.0);
    return out;
}

QuadratureResult integrate_right_tail(const Integrand& f, double A, const QuadratureOptions& opts) {
    if (!(A > 0.0)) throw ValidationError("integrate_right_tail: A > 0 required");
    auto g = [&f, A](double t) {
        double z = A / t;
        return f(z) * A / (t * t);
    };
    return integrate(g, 0.0, 1.0, opts, {0.0});
}

}  // namespace hslab
