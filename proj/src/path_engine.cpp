#include "hslab/path_engine.hpp"

#include <algorithm>
#include <cmath>

#include "hslab/kernels.hpp"

namespace hslab {

namespace {

struct Interval1 {
    double l, r;
};

Interval1 interval_of(const DomainGeometry& U) {
    if (U.dim != 1) throw UnsupportedModel("1-d sampler on a d > 1 domain");
    DomainGeometry b = U.as_ball();
    return {b.center[0] - b.radius, b.center[0] + b.radius};
}

double num_grad1(const HarmonicFunction& u, double x) {
    const double h = 1e-6;
    return (u.value(Point(x + h)) - u.value(Point(x - h))) / (2.0 * h);
}

double grad1(const HarmonicFunction& u, double x) {
    if (u.has_gradient()) return u.gradient(Point(x))[0];
    return num_grad1(u, x);
}

Point uniform_direction(int dim, Rng& rng) {
    if (dim == 1) return Point(rng.bernoulli(0.5) ? 1.0 : -1.0);
    for (;;) {
        Point p;
        p.dim = dim;
        for (int i = 0; i < dim; ++i) p[i] = rng.normal();
        double n = p.norm();
        if (n > 1e-12) return (1.0 / n) * p;
    }
}

// ---- core steppers -------------------------------------------------------

// Euler + bridge-crossing exit for a 1-d diffusion; calls on_move(t, a, b)
// for every retained increment; returns the exit point, sets exit time
template <class OnMove>
double run_brownian_interval(const OperatorModel& model, Interval1 U, double x0, Rng& rng,
                             const PathConfig& cfg, OnMove&& on_move, double* exit_time,
                             double t_cap = INFINITY) {
    const double sig = std::sqrt(model.sigma2);
    const double dt = cfg.step;
    const double sdt = sig * std::sqrt(dt);
    double x = x0, t = 0.0;
    for (long k = 0; k < cfg.max_steps_per_path; ++k) {
        if (t >= t_cap) {
            if (exit_time) *exit_time = t;
            return x;
        }
        double xn = x + sdt * rng.normal();
        if (xn >= U.r) {
            double frac = (U.r - x) / (xn - x);
            on_move(t, x, U.r);
            if (exit_time) *exit_time = t + frac * dt;
            return U.r;
        }
        if (xn <= U.l) {
            double frac = (U.l - x) / (xn - x);
            on_move(t, x, U.l);
            if (exit_time) *exit_time = t + frac * dt;
            return U.l;
        }
        // Brownian-bridge crossing probabilities for the step
        double pr = std::exp(-2.0 * (U.r - x) * (U.r - xn) / (model.sigma2 * dt));
        double pl = std::exp(-2.0 * (x - U.l) * (xn - U.l) / (model.sigma2 * dt));
        double uu = rng.uniform();
        if (uu < pr) {
            on_move(t, x, U.r);
            if (exit_time) *exit_time = t + 0.5 * dt;
            return U.r;
        }
        if (uu < pr + pl) {
            on_move(t, x, U.l);
            if (exit_time) *exit_time = t + 0.5 * dt;
            return U.l;
        }
        on_move(t, x, xn);
        x = xn;
        t += dt;
    }
    throw ComputationError("brownian skeleton: max steps exceeded");
}

// exact stable increments on the grid; on_move per step; returns exit point
template <class OnMove>
double run_stable_skeleton_1d(const OperatorModel& model, Interval1 U, double x0, Rng& rng,
                              const PathConfig& cfg, OnMove&& on_move, double* exit_time,
                              double t_cap = INFINITY) {
    const double alpha = model.jump.alpha;
    const double dt_eff = model.jump.scale * cfg.step;
    const double amp = std::pow(dt_eff, 1.0 / alpha);
    double x = x0, t = 0.0;
    for (long k = 0; k < cfg.max_steps_per_path; ++k) {
        if (t >= t_cap) {
            if (exit_time) *exit_time = t;
            return x;
        }
        double xn = x + amp * rng.stable_symmetric(alpha);
        on_move(t, x, xn);
        t += cfg.step;
        if (xn <= U.l || xn >= U.r) {
            if (exit_time) *exit_time = t;
            return xn;
        }
        x = xn;
    }
    throw ComputationError("stable skeleton: max steps exceeded");
}

struct ArParams {
    double delta = 0.0;       // small-jump threshold
    double lambda = 0.0;      // big-jump rate
    double sigma2_small = 0;  // Gaussian replacement variance rate
    double sigma2_cont = 0;   // diffusion + replacement
};

ArParams ar_params(const OperatorModel& model, const PathConfig& cfg) {
    ArParams p;
    if (model.has_jumps()) {
        p.delta = resolve_delta_j(model, cfg);
        p.lambda = model.levy_tail_mass(p.delta);
        p.sigma2_small = model.levy_truncated_variance(p.delta);
    }
    p.sigma2_cont = model.sigma2 + p.sigma2_small;
    return p;
}

double sample_big_jump(const OperatorModel& model, double delta, Rng& rng) {
    const double alpha = model.jump.alpha;
    for (;;) {
        double mag = delta * std::pow(rng.uniform(), -1.0 / alpha);
        if (model.jump.kind == JumpKind::RadialLevy && model.jump.tempering > 0.0) {
            if (rng.uniform() > std::exp(-model.jump.tempering * (mag - delta))) continue;
        }
        return rng.bernoulli(0.5) ? mag : -mag;
    }
}

// Gaussian + big-jump scheme; on_move(t,a,b) per Gaussian sub-step,
// on_jump(t,a,b) per big jump. Exit at the first sub-event landing outside.
template <class OnMove, class OnJump>
double run_ar_scheme_1d(const OperatorModel& model, const ArParams& ar, Interval1 U, double x0,
                        Rng& rng, const PathConfig& cfg, OnMove&& on_move, OnJump&& on_jump,
                        double* exit_time, double t_cap = INFINITY) {
    const double dt = cfg.step;
    const double sdt = std::sqrt(ar.sigma2_cont * dt);
    double x = x0, t = 0.0;
    for (long k = 0; k < cfg.max_steps_per_path; ++k) {
        if (t >= t_cap) {
            if (exit_time) *exit_time = t;
            return x;
        }
        double xn = x + sdt * rng.normal();
        bool gaussian_exit = false;
        if (xn >= U.r || xn <= U.l) {
            gaussian_exit = true;
        } else if (ar.sigma2_cont > 0.0) {
            double pr = std::exp(-2.0 * (U.r - x) * (U.r - xn) / (ar.sigma2_cont * dt));
            double pl = std::exp(-2.0 * (x - U.l) * (xn - U.l) / (ar.sigma2_cont * dt));
            double uu = rng.uniform();
            if (uu < pr) {
                xn = U.r;
                gaussian_exit = true;
            } else if (uu < pr + pl) {
                xn = U.l;
                gaussian_exit = true;
            }
        }
        on_move(t, x, xn);
        if (gaussian_exit) {
            if (exit_time) *exit_time = t + 0.5 * dt;
            return xn;
        }
        x = xn;
        int m = ar.lambda > 0.0 ? rng.poisson(ar.lambda * dt) : 0;
        for (int j = 0; j < m; ++j) {
            double jmp = sample_big_jump(model, ar.delta, rng);
            double xj = x + jmp;
            on_jump(t, x, xj);
            x = xj;
            if (x <= U.l || x >= U.r) {
                if (exit_time) *exit_time = t + dt;
                return x;
            }
        }
        t += dt;
    }
    throw ComputationError("jump-diffusion scheme: max steps exceeded");
}

// exact exit position of the stable ball walk
Point run_stable_ballwalk(const OperatorModel& model, const DomainGeometry& U, const Point& x0,
                          Rng& rng) {
    const double alpha = model.jump.alpha;
    DomainGeometry ball = U.as_ball();
    Point x = x0;
    for (int it = 0; it < 200000; ++it) {
        double rho = ball.radius - dist(x, ball.center);
        if (rho <= 0.0) return x;  // already outside or on the rim
        double s = rng.beta(1.0 - 0.5 * alpha, 0.5 * alpha);
        double mag = 1.0 / std::sqrt(std::max(1.0 - s, 1e-300));
        Point dir = uniform_direction(x.dim, rng);
        x = x + (rho * mag) * dir;
        if (!ball.contains(x)) return x;
    }
    throw ComputationError("stable ball walk failed to terminate");
}

}  // namespace

double resolve_delta_j(const OperatorModel& model, const PathConfig& cfg) {
    if (cfg.delta_j > 0.0) return cfg.delta_j;
    if (!model.has_jumps()) return 0.0;
    // variance rule: the Gaussian-replaced variance stays at 1% of the
    // unit-truncated jump variance
    double target = 0.01 * model.levy_truncated_variance(1.0);
    double lo = 1e-8, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        double mid = std::sqrt(lo * hi);
        if (model.levy_truncated_variance(mid) > target)
            hi = mid;
        else
            lo = mid;
    }
    double delta = std::sqrt(lo * hi);
    // rate cap: at most ~4 exact jumps per step on average, otherwise the
    // threshold is raised (the re-attributed Gaussian keeps second moments
    // exact, so only third-order bias grows)
    double max_rate = 4.0 / cfg.step;
    if (model.levy_tail_mass(delta) > max_rate) {
        lo = delta;
        hi = 4.0;
        for (int i = 0; i < 100; ++i) {
            double mid = std::sqrt(lo * hi);
            if (model.levy_tail_mass(mid) > max_rate)
                lo = mid;
            else
                hi = mid;
        }
        delta = std::sqrt(lo * hi);
    }
    return delta;
}

// ---- samplers -------------------------------------------------------------

PathSample sample_brownian_exit(const OperatorModel& model, const DomainGeometry& U,
                                const Point& x, Rng& rng, const PathConfig& cfg) {
    if (!model.has_diffusion() || model.has_jumps())
        throw UnsupportedModel("sample_brownian_exit: diffusion-only model expected");
    PathSample ps;
    if (U.dim == 1) {
        Interval1 iv = interval_of(U);
        double pr = (x[0] - iv.l) / (iv.r - iv.l);
        bool right = rng.bernoulli(pr);
        ps.exit_point = Point(right ? iv.r : iv.l);
        ps.exit_time = (x[0] - iv.l) * (iv.r - x[0]) / model.sigma2;  // mean, not pathwise
        ps.bias_note = "interval exit law exact; exit_time is the mean";
        return ps;
    }
    // walk on spheres
    DomainGeometry ball = U.as_ball();
    const double eps = cfg.eps_wos_rel * ball.radius;
    Point p = x;
    double tacc = 0.0;
    for (int it = 0; it < 100000; ++it) {
        double rho = ball.radius - dist(p, ball.center);
        if (rho <= eps) {
            Point d = p - ball.center;
            double n = d.norm();
            ps.exit_point = n > 1e-300 ? ball.center + (ball.radius / n) * d
                                       : ball.center + ball.radius * uniform_direction(U.dim, rng);
            ps.exit_time = tacc;
            ps.bias_note = "walk-on-spheres: exit within eps shell; time = summed ball means";
            return ps;
        }
        tacc += rho * rho / (U.dim * model.sigma2);
        p = p + rho * uniform_direction(U.dim, rng);
    }
    throw ComputationError("walk-on-spheres failed to reach the boundary shell");
}

PathSample sample_brownian_path(const OperatorModel& model, const DomainGeometry& U,
                                const Point& x, Rng& rng, const PathConfig& cfg) {
    if (!model.has_diffusion() || model.has_jumps())
        throw UnsupportedModel("sample_brownian_path: diffusion-only model expected");
    Interval1 iv = interval_of(U);
    PathSample ps;
    ps.bias_note = "euler skeleton with bridge exit; step=" + std::to_string(cfg.step);
    if (cfg.record_skeleton) ps.skeleton.push_back({0.0, x});
    double et = 0.0;
    double xe = run_brownian_interval(
        model, iv, x[0], rng, cfg,
        [&](double t, double, double b) {
            if (cfg.record_skeleton) ps.skeleton.push_back({t + cfg.step, Point(b)});
        },
        &et);
    ps.exit_point = Point(xe);
    ps.exit_time = et;
    return ps;
}

PathSample sample_stable_exit(const OperatorModel& model, const DomainGeometry& U,
                              const Point& x, Rng& rng, const PathConfig& cfg) {
    if (!model.pure_jump() || model.jump.kind != JumpKind::StableRadial)
        throw UnsupportedModel("sample_stable_exit: pure StableRadial model expected");
    PathSample ps;
    double thresh = cfg.jump_record_threshold > 0.0 ? cfg.jump_record_threshold
                                                    : resolve_delta_j(model, cfg);
    if (U.dim == 1) {
        Interval1 iv = interval_of(U);
        if (cfg.record_skeleton) ps.skeleton.push_back({0.0, x});
        double et = 0.0;
        double prev = x[0];
        double xe = run_stable_skeleton_1d(
            model, iv, x[0], rng, cfg,
            [&](double t, double a, double b) {
                if (cfg.record_skeleton) ps.skeleton.push_back({t + cfg.step, Point(b)});
                if (std::abs(b - a) > thresh) ps.jumps.push_back({t, a, b});
                prev = a;
            },
            &et);
        // the step that left U is the exit jump; make sure it is recorded
        if (ps.jumps.empty() || ps.jumps.back().after != xe)
            ps.jumps.push_back({et - cfg.step, prev, xe});
        ps.exit_point = Point(xe);
        ps.exit_time = et;
        ps.bias_note = "exact stable increments on a fixed grid; per-step aggregation";
        return ps;
    }
    // d >= 2 by subordination: increment = sqrt(2 S_dt) N(0, I)
    DomainGeometry ball = U.as_ball();
    const double alpha = model.jump.alpha;
    const double dt_eff = model.jump.scale * cfg.step;
    Point p = x;
    double t = 0.0;
    if (cfg.record_skeleton) ps.skeleton.push_back({0.0, p});
    for (long k = 0; k < cfg.max_steps_per_path; ++k) {
        double S = std::pow(dt_eff, 2.0 / alpha) * rng.stable_positive(0.5 * alpha);
        double amp = std::sqrt(2.0 * S);
        Point pn = p;
        for (int i = 0; i < U.dim; ++i) pn[i] += amp * rng.normal();
        t += cfg.step;
        if (cfg.record_skeleton) ps.skeleton.push_back({t, pn});
        if (dist(pn, p) > thresh) ps.jumps.push_back({t - cfg.step, p[0], pn[0]});
        if (!ball.contains(pn)) {
            ps.exit_point = pn;
            ps.exit_time = t;
            ps.bias_note = "subordinated stable skeleton";
            return ps;
        }
        p = pn;
    }
    throw ComputationError("stable skeleton (d>1): max steps exceeded");
}

PathSample sample_stable_exit_ballwalk(const OperatorModel& model, const DomainGeometry& U,
                                       const Point& x, Rng& rng, const PathConfig& cfg) {
    (void)cfg;
    if (!model.pure_jump() || model.jump.kind != JumpKind::StableRadial)
        throw UnsupportedModel("ball walk: pure StableRadial model expected");
    PathSample ps;
    ps.exit_point = run_stable_ballwalk(model, U, x, rng);
    ps.exit_time = NAN;
    ps.bias_note = "ball walk: exit position exact in law, no time information";
    return ps;
}

PathSample sample_mixed_exit(const OperatorModel& model, const DomainGeometry& U, const Point& x,
                             Rng& rng, const PathConfig& cfg) {
    if (!model.has_jumps() && model.has_diffusion()) return sample_brownian_path(model, U, x, rng, cfg);
    if (!model.simulable()) throw UnsupportedModel("model is not simulable");
    Interval1 iv = interval_of(U);
    ArParams ar = ar_params(model, cfg);
    PathSample ps;
    ps.bias_note = "gaussian + big jumps; delta_j=" + std::to_string(ar.delta) +
                   " sigma2_small=" + std::to_string(ar.sigma2_small);
    if (cfg.record_skeleton) ps.skeleton.push_back({0.0, x});
    double et = 0.0;
    double xe = run_ar_scheme_1d(
        model, ar, iv, x[0], rng, cfg,
        [&](double t, double, double b) {
            if (cfg.record_skeleton) ps.skeleton.push_back({t + cfg.step, Point(b)});
        },
        [&](double t, double a, double b) { ps.jumps.push_back({t, a, b}); },
        &et);
    ps.exit_point = Point(xe);
    ps.exit_time = et;
    return ps;
}

// ---- estimators -----------------------------------------------------------

namespace {

enum class ExitSamplerKind { BrownianExact, BrownianWos, StableBallwalk, ArScheme };

ExitSamplerKind pick_exit_sampler(const OperatorModel& model, const DomainGeometry& U) {
    if (!model.simulable()) throw UnsupportedModel("model is not simulable: " + model.describe());
    if (model.has_diffusion() && !model.has_jumps())
        return U.dim == 1 ? ExitSamplerKind::BrownianExact : ExitSamplerKind::BrownianWos;
    if (model.pure_jump() && model.jump.kind == JumpKind::StableRadial)
        return ExitSamplerKind::StableBallwalk;
    return ExitSamplerKind::ArScheme;
}

// integrability heuristic over batch partials: for an L^1 functional the
// largest observation is o(sqrt(n var)); a single path carrying a fixed
// fraction of the total second moment signals a divergent tail. Secondary
// check: the running variance keeps growing between the half and the full
// sample.
void check_integrability(const std::vector<std::array<double, 4>>& batch_stats) {
    long n = 0;
    double s = 0, s2 = 0, maxv = 0;
    for (const auto& b : batch_stats) {
        s += b[0];
        s2 += b[1];
        n += static_cast<long>(b[2]);
        maxv = std::max(maxv, b[3]);
    }
    if (n < 4000) return;
    double mean = s / n;
    double var = std::max(0.0, s2 / n - mean * mean);
    // rounding-level variance means a (near-)degenerate functional
    if (var <= 1e-10 * (mean * mean + maxv * maxv)) return;
    if (maxv * maxv > 0.2 * static_cast<double>(n) * var)
        throw NonIntegrableDetected(
            "a single path carries a macroscopic share of the second moment; the exit "
            "functional does not appear to be square-summable at this tail weight");
    double s_h = 0, s2_h = 0;
    long n_h = 0;
    for (size_t i = 0; i < batch_stats.size() / 2; ++i) {
        s_h += batch_stats[i][0];
        s2_h += batch_stats[i][1];
        n_h += static_cast<long>(batch_stats[i][2]);
    }
    if (n_h > 1000) {
        double mean_h = s_h / n_h;
        double var_h = std::max(0.0, s2_h / n_h - mean_h * mean_h);
        if (var_h > 0.0 && var > 8.0 * var_h)
            throw NonIntegrableDetected(
                "running variance keeps growing across batches; the exit functional does "
                "not appear to be integrable");
    }
}

}  // namespace

EstimatorResult estimate_exit_functional(const OperatorModel& model, const DomainGeometry& U,
                                         const Point& x,
                                         const std::function<double(const Point&)>& f,
                                         const PathConfig& cfg) {
    ExitSamplerKind kind = pick_exit_sampler(model, U);
    std::vector<std::array<double, 4>> batch_stats;
    std::array<EstimatorResult, 1> est;
    switch (kind) {
        case ExitSamplerKind::BrownianExact: {
            Interval1 iv = interval_of(U);
            double pr = (x[0] - iv.l) / (iv.r - iv.l);
            double fl = f(Point(iv.l)), fr = f(Point(iv.r));
            est = estimate_batched<1>(
                cfg,
                [&](Rng& rng) {
                    return std::array<double, 1>{rng.bernoulli(pr) ? fr : fl};
                },
                &batch_stats);
            est[0].bias_note = "two-point exit law (exact)";
            break;
        }
        case ExitSamplerKind::BrownianWos: {
            est = estimate_batched<1>(
                cfg,
                [&](Rng& rng) {
                    PathSample ps = sample_brownian_exit(model, U, x, rng, cfg);
                    return std::array<double, 1>{f(ps.exit_point)};
                },
                &batch_stats);
            est[0].bias_note = "walk-on-spheres exit";
            break;
        }
        case ExitSamplerKind::StableBallwalk: {
            est = estimate_batched<1>(
                cfg,
                [&](Rng& rng) {
                    Point z = run_stable_ballwalk(model, U, x, rng);
                    return std::array<double, 1>{f(z)};
                },
                &batch_stats);
            est[0].bias_note = "ball-walk exit (exact in law)";
            break;
        }
        case ExitSamplerKind::ArScheme: {
            ArParams ar = ar_params(model, cfg);
            Interval1 iv = interval_of(U);
            est = estimate_batched<1>(
                cfg,
                [&](Rng& rng) {
                    double xe = run_ar_scheme_1d(
                        model, ar, iv, x[0], rng, cfg, [](double, double, double) {},
                        [](double, double, double) {}, nullptr);
                    return std::array<double, 1>{f(Point(xe))};
                },
                &batch_stats);
            est[0].bias_note = "jump-diffusion scheme exit";
            break;
        }
    }
    check_integrability(batch_stats);
    return est[0];
}

EstimatorResult estimate_mean_exit_time(const OperatorModel& model, const DomainGeometry& U,
                                        const Point& x, const PathConfig& cfg) {
    if (!model.simulable()) throw UnsupportedModel("model is not simulable");
    if (model.has_diffusion() && !model.has_jumps() && U.dim >= 2) {
        auto est = estimate_batched<1>(cfg, [&](Rng& rng) {
            PathSample ps = sample_brownian_exit(model, U, x, rng, cfg);
            return std::array<double, 1>{ps.exit_time};
        });
        est[0].bias_note = "walk-on-spheres mean-time accumulation";
        return est[0];
    }
    Interval1 iv = interval_of(U);
    if (model.has_diffusion() && !model.has_jumps()) {
        auto est = estimate_batched<1>(cfg, [&](Rng& rng) {
            double et = 0.0;
            run_brownian_interval(model, iv, x[0], rng, cfg, [](double, double, double) {}, &et);
            return std::array<double, 1>{et};
        });
        est[0].bias_note = "euler+bridge skeleton time";
        return est[0];
    }
    if (model.pure_jump() && model.jump.kind == JumpKind::StableRadial) {
        auto est = estimate_batched<1>(cfg, [&](Rng& rng) {
            double et = 0.0;
            run_stable_skeleton_1d(model, iv, x[0], rng, cfg, [](double, double, double) {},
                                   &et);
            return std::array<double, 1>{et};
        });
        est[0].bias_note = "stable skeleton time (grid resolution bias)";
        return est[0];
    }
    ArParams ar = ar_params(model, cfg);
    auto est = estimate_batched<1>(cfg, [&](Rng& rng) {
        double et = 0.0;
        run_ar_scheme_1d(model, ar, iv, x[0], rng, cfg, [](double, double, double) {},
                         [](double, double, double) {}, &et);
        return std::array<double, 1>{et};
    });
    est[0].bias_note = "jump-diffusion scheme time";
    return est[0];
}

EstimatorResult estimate_qv_integral(const OperatorModel& model, const DomainGeometry& U,
                                     const Point& x, const HarmonicFunction& u,
                                     const std::function<double(double)>& weight_pos,
                                     const PathConfig& cfg) {
    if (!model.has_diffusion()) {
        EstimatorResult r;
        r.n_paths = cfg.n_paths;
        r.bias_note = "no continuous part";
        return r;
    }
    Interval1 iv = interval_of(U);
    const double s2 = model.sigma2;
    auto ugrad = [&u](double z) { return grad1(u, z); };
    if (!model.has_jumps()) {
        auto est = estimate_batched<1>(cfg, [&](Rng& rng) {
            double acc = 0.0;
            run_brownian_interval(
                model, iv, x[0], rng, cfg,
                [&](double, double a, double) {
                    double g = ugrad(a);
                    acc += weight_pos(a) * s2 * g * g * cfg.step;
                },
                nullptr);
            return std::array<double, 1>{acc};
        });
        est[0].bias_note = "riemann sum along euler+bridge skeleton";
        return est[0];
    }
    ArParams ar = ar_params(model, cfg);
    auto est = estimate_batched<1>(cfg, [&](Rng& rng) {
        double acc = 0.0;
        run_ar_scheme_1d(
            model, ar, iv, x[0], rng, cfg,
            [&](double, double a, double) {
                double g = ugrad(a);
                acc += weight_pos(a) * s2 * g * g * cfg.step;
            },
            [](double, double, double) {}, nullptr);
        return std::array<double, 1>{acc};
    });
    est[0].bias_note = "riemann sum along jump-diffusion skeleton (diffusion bracket only)";
    return est[0];
}

EstimatorResult estimate_jump_bregman_sum(const OperatorModel& model, const DomainGeometry& U,
                                          const Point& x, const HarmonicFunction& u,
                                          const ConvexSpec& spec, const PathConfig& cfg,
                                          const std::function<double(double)>& weight_pos) {
    if (!model.has_jumps())
        throw UnsupportedModel("estimate_jump_bregman_sum: jump part required");
    if (!model.simulable()) throw UnsupportedModel("model is not simulable");
    Interval1 iv = interval_of(U);
    ArParams ar = ar_params(model, cfg);
    CurvatureMeasure cm = spec.curvature_measure();
    auto g = cm.density;
    auto uval = [&u](double z) { return u.value(Point(z)); };
    auto ugrad = [&u](double z) { return grad1(u, z); };
    auto wpos = [&weight_pos](double z) { return weight_pos ? weight_pos(z) : 1.0; };
    const double s2small = ar.sigma2_small;
    auto est = estimate_batched<1>(cfg, [&](Rng& rng) {
        double acc = 0.0;
        run_ar_scheme_1d(
            model, ar, iv, x[0], rng, cfg,
            [&](double, double a, double) {
                // Gaussian-replaced small jumps, re-attributed to the jump sum
                double gr = ugrad(a);
                acc += 0.5 * g(uval(a)) * wpos(a) * s2small * gr * gr * cfg.step;
            },
            [&](double, double a, double b) {
                acc += spec.bregman(uval(a), uval(b)) * wpos(b);
            },
            nullptr);
        return std::array<double, 1>{acc};
    });
    est[0].bias_note = "big jumps exact above delta_j=" + std::to_string(ar.delta) +
                       "; small jumps folded via curvature density";
    return est[0];
}

EstimatorResult estimate_local_time(const OperatorModel& model, const DomainGeometry& U,
                                    const Point& x, const HarmonicFunction& u, double level,
                                    const PathConfig& cfg) {
    if (!model.has_diffusion() || model.has_jumps())
        throw UnsupportedModel("local-time estimation is restricted to the 1-d diffusion case");
    Interval1 iv = interval_of(U);
    auto uval = [&u](double z) { return u.value(Point(z)); };
    const double a0 = level;
    auto est = estimate_batched<1>(cfg, [&](Rng& rng) {
        double stoch = 0.0;
        double xe = run_brownian_interval(
            model, iv, x[0], rng, cfg,
            [&](double, double a, double b) {
                stoch += sgn_left(uval(a) - a0) * (uval(b) - uval(a));
            },
            nullptr);
        return std::array<double, 1>{std::abs(uval(xe) - a0) - std::abs(uval(x[0]) - a0) -
                                     stoch};
    });
    est[0].bias_note = "tanaka residual along euler+bridge skeleton";
    return est[0];
}

EstimatorResult h_transform_reweight(const OperatorModel& model, const DomainGeometry& D,
                                     const DomainGeometry& U, const Point& x,
                                     const std::function<double(const Point&)>& functional,
                                     const HarmonicFunction& h, const PathConfig& cfg) {
    if (!strictly_inside(U, D)) throw ValidationError("h-transform: U strictly inside D required");
    double hx = h.value(x);
    if (!(hx > 0.0)) throw ValidationError("h-transform: h(x) > 0 required");
    ExitSamplerKind kind = pick_exit_sampler(model, U);
    ArParams ar;
    if (kind == ExitSamplerKind::ArScheme) ar = ar_params(model, cfg);
    Interval1 iv{0, 0};
    double pright = 0, fl = 0, fr = 0, wl = 0, wr = 0;
    if (U.dim == 1) iv = interval_of(U);
    DomainGeometry dcopy = D;
    auto weight_at = [&](const Point& z) {
        if (!dcopy.contains(z)) return 0.0;
        double hz = h.value(z);
        return hz > 0.0 ? hz / hx : 0.0;
    };
    if (kind == ExitSamplerKind::BrownianExact) {
        pright = (x[0] - iv.l) / (iv.r - iv.l);
        fl = functional(Point(iv.l));
        fr = functional(Point(iv.r));
        wl = weight_at(Point(iv.l));
        wr = weight_at(Point(iv.r));
    }
    auto per_path = [&](Rng& rng) -> std::array<double, 2> {
        Point z;
        switch (kind) {
            case ExitSamplerKind::BrownianExact:
                return rng.bernoulli(pright) ? std::array<double, 2>{fr * wr, wr}
                                             : std::array<double, 2>{fl * wl, wl};
            case ExitSamplerKind::BrownianWos: {
                PathSample ps = sample_brownian_exit(model, U, x, rng, cfg);
                z = ps.exit_point;
                break;
            }
            case ExitSamplerKind::StableBallwalk:
                z = run_stable_ballwalk(model, U, x, rng);
                break;
            case ExitSamplerKind::ArScheme: {
                double xe = run_ar_scheme_1d(model, ar, iv, x[0], rng, cfg,
                                             [](double, double, double) {},
                                             [](double, double, double) {}, nullptr);
                z = Point(xe);
                break;
            }
        }
        double wz = weight_at(z);
        return {wz > 0.0 ? functional(z) * wz : 0.0, wz};
    };
    auto est = estimate_batched<2>(cfg, per_path);
    // effective sample size from the weight moments
    double mw = est[1].mean;
    double vw = est[1].stderr_ * est[1].stderr_ * est[1].n_paths;
    double ew2 = vw + mw * mw;
    double ess = ew2 > 0.0 ? est[1].n_paths * mw * mw / ew2 : 0.0;
    if (ess < cfg.ess_floor * static_cast<double>(est[1].n_paths))
        throw DegenerateWeights("h-transform effective sample size " + std::to_string(ess) +
                                " below floor");
    EstimatorResult out = est[0];
    out.bias_note = "h-weighted exit estimate, ESS=" + std::to_string(ess);
    return out;
}

std::vector<EstimatorResult> estimate_green_histogram(const OperatorModel& model,
                                                      const DomainGeometry& U, const Point& x,
                                                      int bins, const PathConfig& cfg) {
    if (!model.simulable()) throw UnsupportedModel("model is not simulable");
    Interval1 iv = interval_of(U);
    const double width = (iv.r - iv.l) / bins;
    std::vector<double> sum(static_cast<size_t>(bins), 0.0),
        sum2(static_cast<size_t>(bins), 0.0);
    long count = 0;
    const long bs = std::max<long>(1, cfg.batch_size);
    const long nbatches = (cfg.n_paths + bs - 1) / bs;
    std::vector<double> occ(static_cast<size_t>(bins));
    ArParams ar;
    bool use_ar = model.has_jumps();
    if (use_ar) ar = ar_params(model, cfg);
    for (long b = 0; b < nbatches; ++b) {
        Rng rng = Rng::for_batch(cfg.seed, static_cast<uint64_t>(b));
        long lo = b * bs, hi = std::min(cfg.n_paths, lo + bs);
        for (long i = lo; i < hi; ++i) {
            std::fill(occ.begin(), occ.end(), 0.0);
            auto visit = [&](double, double a, double) {
                int k = static_cast<int>((a - iv.l) / width);
                if (k >= 0 && k < bins) occ[static_cast<size_t>(k)] += cfg.step;
            };
            if (use_ar)
                run_ar_scheme_1d(model, ar, iv, x[0], rng, cfg, visit,
                                 [](double, double, double) {}, nullptr);
            else
                run_brownian_interval(model, iv, x[0], rng, cfg, visit, nullptr);
            for (int k = 0; k < bins; ++k) {
                double v = occ[static_cast<size_t>(k)] / width;  // density estimate
                sum[static_cast<size_t>(k)] += v;
                sum2[static_cast<size_t>(k)] += v * v;
            }
            ++count;
        }
    }
    std::vector<EstimatorResult> out(static_cast<size_t>(bins));
    for (int k = 0; k < bins; ++k) {
        double mean = sum[static_cast<size_t>(k)] / count;
        double var = std::max(0.0, sum2[static_cast<size_t>(k)] / count - mean * mean);
        out[static_cast<size_t>(k)].mean = mean;
        out[static_cast<size_t>(k)].stderr_ = std::sqrt(var / count);
        out[static_cast<size_t>(k)].n_paths = count;
        out[static_cast<size_t>(k)].bias_note = "occupation histogram";
    }
    return out;
}

HarmonicityReport check_harmonicity(const OperatorModel& model, const HarmonicFunction& u,
                                    const DomainGeometry& D, long trials,
                                    const PathConfig& cfg) {
    HarmonicityReport rep;
    PathConfig c = cfg;
    c.n_paths = trials;
    const double shrink_levels[3] = {0.85, 0.55, 0.3};
    DomainGeometry bd = D.as_ball();
    for (double s : shrink_levels) {
        DomainGeometry U = bd.shrink(s);
        for (double off : {0.0, 0.4}) {
            Point x = U.center;
            x[0] += off * U.radius;
            double ux = u.value(x);
            auto est = estimate_exit_functional(model, U, x,
                                                [&u](const Point& z) { return u.value(z); }, c);
            HarmonicityRow row;
            row.what = "mean-value on " + U.describe() + " from x0+" + std::to_string(off);
            row.expected = ux;
            row.estimate = est.mean;
            row.stderr_ = est.stderr_;
            row.pass = std::abs(est.mean - ux) <= 3.0 * std::max(est.stderr_, 1e-14);
            rep.pass = rep.pass && row.pass;
            rep.rows.push_back(row);
        }
    }
    // fixed-time martingale probe (1-d skeleton models only)
    if (D.dim == 1 && model.simulable()) {
        DomainGeometry U = bd.shrink(0.6);
        Point x = U.center;
        Interval1 iv = interval_of(U);
        double tcap;
        if (KernelSet::available(model, U))
            tcap = 0.5 * KernelSet(model, U).mean_exit_time(x);
        else
            tcap = 0.25 * (iv.r - iv.l) * (iv.r - iv.l);
        ArParams ar;
        bool use_ar = model.has_jumps();
        if (use_ar) ar = ar_params(model, c);
        auto est = estimate_batched<1>(c, [&](Rng& rng) -> std::array<double, 1> {
            double xe;
            if (use_ar)
                xe = run_ar_scheme_1d(model, ar, iv, x[0], rng, c, [](double, double, double) {},
                                      [](double, double, double) {}, nullptr, tcap);
            else
                xe = run_brownian_interval(model, iv, x[0], rng, c,
                                           [](double, double, double) {}, nullptr, tcap);
            return {u.value(Point(xe))};
        });
        HarmonicityRow row;
        row.what = "martingale probe at t=" + std::to_string(tcap);
        row.expected = u.value(x);
        row.estimate = est[0].mean;
        row.stderr_ = est[0].stderr_;
        row.pass = std::abs(est[0].mean - row.expected) <= 3.0 * std::max(est[0].stderr_, 1e-14);
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

ClosureReport ito_meyer_closure(const OperatorModel& model, const DomainGeometry& U,
                                const Point& x, const HarmonicFunction& u,
                                const ConvexSpec& spec, const PathConfig& cfg) {
    if (spec.has_atoms())
        throw IncompatibleSpec("closure gate needs a curvature density (no atoms)");
    if (!model.simulable()) throw UnsupportedModel("model is not simulable");
    Interval1 iv = interval_of(U);
    CurvatureMeasure cm = spec.curvature_measure();
    auto g = cm.density;
    auto uval = [&u](double z) { return u.value(Point(z)); };
    auto ugrad = [&u](double z) { return grad1(u, z); };
    ClosureReport rep;
    rep.phi_x = spec.value(uval(x[0]));

    bool jumps = model.has_jumps();
    ArParams ar;
    if (jumps) ar = ar_params(model, cfg);
    const double s2cont = jumps ? ar.sigma2_cont : model.sigma2;

    // per-path residual keeps the full correlation structure: its stderr is
    // the right uncertainty for the closure gap
    auto est = estimate_batched<4>(cfg, [&](Rng& rng) -> std::array<double, 4> {
        double qv = 0.0, js = 0.0;
        double xe;
        auto on_move = [&](double, double a, double) {
            double gr = ugrad(a);
            qv += 0.5 * g(uval(a)) * s2cont * gr * gr * cfg.step;
        };
        if (jumps)
            xe = run_ar_scheme_1d(model, ar, iv, x[0], rng, cfg, on_move,
                                  [&](double, double a, double b) {
                                      js += spec.bregman(uval(a), uval(b));
                                  },
                                  nullptr);
        else
            xe = run_brownian_interval(model, iv, x[0], rng, cfg, on_move, nullptr);
        double lhs = spec.value(uval(xe));
        return {lhs, qv, js, lhs - qv - js};
    });
    rep.lhs = est[0].mean;
    rep.qv_half = est[1].mean;
    rep.jump_sum = est[2].mean;
    rep.combined_stderr = est[3].stderr_;
    rep.gap = std::abs(est[3].mean - rep.phi_x);
    rep.n_paths = est[3].n_paths;
    rep.pass = rep.gap <= 3.0 * std::max(rep.combined_stderr, 1e-14);
    return rep;
}

}  // namespace hslab
