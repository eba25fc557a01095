#ifndef HSLAB_PATH_ENGINE_HPP
#define HSLAB_PATH_ENGINE_HPP

#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "hslab/convex.hpp"
#include "hslab/harmonic.hpp"
#include "hslab/models.hpp"
#include "hslab/rng.hpp"

namespace hslab {

struct PathConfig {
    long n_paths = 100000;
    uint64_t seed = 1;
    int workers = 0;      // 0 => hardware concurrency
    long batch_size = 8192;
    double step = 1e-3;
    double delta_j = 0.0;  // small-jump threshold; 0 => variance rule
    double eps_wos_rel = 1e-6;
    bool record_skeleton = false;
    double jump_record_threshold = 0.0;  // 0 => delta_j
    long max_steps_per_path = 40000000;
    double ess_floor = 1e-3;  // h-transform effective-sample-size guard
};

struct EstimatorResult {
    double mean = 0.0;
    double stderr_ = 0.0;
    long n_paths = 0;
    std::string bias_note;
};

struct JumpRecord {
    double t;
    double before, after;  // d = 1 positions (the identity pathways are 1-d)
};

struct PathSample {
    Point exit_point;
    double exit_time = 0.0;
    bool killed = false;
    std::vector<std::pair<double, Point>> skeleton;
    std::vector<JumpRecord> jumps;
    std::string bias_note;
};

// ---------------------------------------------------------------------------
// deterministic parallel driver: batches own their RNG stream (keyed by the
// master seed and the batch index alone), partial sums are reduced in batch
// order, so results are bit-identical for any worker count
// ---------------------------------------------------------------------------

// batch_stats (optional) receives {sum, sum-of-squares, count, max |v|} of
// the first component per batch, in batch order (integrability diagnostics)
template <size_t K, class PerPath>
std::array<EstimatorResult, K> estimate_batched(
    const PathConfig& cfg, PerPath&& per_path,
    std::vector<std::array<double, 4>>* batch_stats = nullptr) {
    const long n = cfg.n_paths;
    const long bs = std::max<long>(1, cfg.batch_size);
    const long nbatches = (n + bs - 1) / bs;
    struct BatchAcc {
        std::array<double, K> sum{};
        std::array<double, K> sum2{};
        double max_abs = 0.0;
        long count = 0;
    };
    std::vector<BatchAcc> acc(static_cast<size_t>(nbatches));

    int nworkers = cfg.workers > 0 ? cfg.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
    if (nworkers < 1) nworkers = 1;
    std::atomic<long> next{0};
    auto work = [&]() {
        for (;;) {
            long b = next.fetch_add(1);
            if (b >= nbatches) return;
            Rng rng = Rng::for_batch(cfg.seed, static_cast<uint64_t>(b));
            long lo = b * bs, hi = std::min(n, lo + bs);
            BatchAcc& a = acc[static_cast<size_t>(b)];
            for (long i = lo; i < hi; ++i) {
                std::array<double, K> v = per_path(rng);
                for (size_t k = 0; k < K; ++k) {
                    a.sum[k] += v[k];
                    a.sum2[k] += v[k] * v[k];
                }
                a.max_abs = std::max(a.max_abs, std::abs(v[0]));
                ++a.count;
            }
        }
    };
    if (nworkers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nworkers));
        for (int w = 0; w < nworkers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::array<double, K> sum{}, sum2{};
    long count = 0;
    for (const auto& a : acc) {  // fixed order
        for (size_t k = 0; k < K; ++k) {
            sum[k] += a.sum[k];
            sum2[k] += a.sum2[k];
        }
        count += a.count;
    }
    std::array<EstimatorResult, K> out;
    for (size_t k = 0; k < K; ++k) {
        double mean = sum[k] / count;
        double var = std::max(0.0, sum2[k] / count - mean * mean);
        out[k].mean = mean;
        out[k].stderr_ = std::sqrt(var / count);
        out[k].n_paths = count;
    }
    if (batch_stats) {
        batch_stats->clear();
        batch_stats->reserve(acc.size());
        for (const auto& a : acc)
            batch_stats->push_back(
                {a.sum[0], a.sum2[0], static_cast<double>(a.count), a.max_abs});
    }
    return out;
}

// ---------------------------------------------------------------------------
// samplers (single path; estimators drive them through estimate_batched)
// ---------------------------------------------------------------------------

// exact-in-law exit point: two-point law on intervals, walk-on-spheres on
// balls (d >= 2, exact up to the stopping shell eps_wos)
PathSample sample_brownian_exit(const OperatorModel& model, const DomainGeometry& U,
                                const Point& x, Rng& rng, const PathConfig& cfg);
// Euler skeleton with Brownian-bridge exit correction (d = 1)
PathSample sample_brownian_path(const OperatorModel& model, const DomainGeometry& U,
                                const Point& x, Rng& rng, const PathConfig& cfg);
// exact stable increments on a fixed time grid; exit = first skeleton point
// outside U; per-step increments above the record threshold land in jumps
PathSample sample_stable_exit(const OperatorModel& model, const DomainGeometry& U,
                              const Point& x, Rng& rng, const PathConfig& cfg);
// exact-in-law exit position via the ball-walk (nested exact ball exits);
// no time grid, exit_time not available
PathSample sample_stable_exit_ballwalk(const OperatorModel& model, const DomainGeometry& U,
                                       const Point& x, Rng& rng, const PathConfig& cfg);
// Gaussian diffusion + compensated small jumps folded into the Gaussian +
// exactly sampled big jumps (recorded); d = 1
PathSample sample_mixed_exit(const OperatorModel& model, const DomainGeometry& U,
                             const Point& x, Rng& rng, const PathConfig& cfg);

// small-jump threshold from the variance rule: keep the Gaussian-replaced
// variance at 1% of the unit-truncated jump variance
double resolve_delta_j(const OperatorModel& model, const PathConfig& cfg);

// ---------------------------------------------------------------------------
// estimators
// ---------------------------------------------------------------------------

EstimatorResult estimate_exit_functional(const OperatorModel& model, const DomainGeometry& U,
                                         const Point& x,
                                         const std::function<double(const Point&)>& f,
                                         const PathConfig& cfg);

EstimatorResult estimate_mean_exit_time(const OperatorModel& model, const DomainGeometry& U,
                                        const Point& x, const PathConfig& cfg);

// E int_0^tau w(X_s) d[u(X)]^c_s via Riemann sums along the skeleton; the
// weight is a function of the position so curvature-density and conditional
// weights compose into it
EstimatorResult estimate_qv_integral(const OperatorModel& model, const DomainGeometry& U,
                                     const Point& x, const HarmonicFunction& u,
                                     const std::function<double(double)>& weight_pos,
                                     const PathConfig& cfg);

// E sum F_phi(u(X_{s-}), u(X_s)) [* weight(X_s)] over recorded jumps
// including the exit jump; the Gaussian-replaced small-jump mass is
// re-attributed here as (1/2) E int g(u) w sigma_delta^2 |grad u|^2 dt so the
// estimate is comparable with the full jump integral
EstimatorResult estimate_jump_bregman_sum(const OperatorModel& model, const DomainGeometry& U,
                                          const Point& x, const HarmonicFunction& u,
                                          const ConvexSpec& spec, const PathConfig& cfg,
                                          const std::function<double(double)>& weight_pos = {});

// Tanaka residual along the skeleton: 1-d diffusion only
EstimatorResult estimate_local_time(const OperatorModel& model, const DomainGeometry& U,
                                    const Point& x, const HarmonicFunction& u, double level,
                                    const PathConfig& cfg);

EstimatorResult h_transform_reweight(const OperatorModel& model, const DomainGeometry& D,
                                     const DomainGeometry& U, const Point& x,
                                     const std::function<double(const Point&)>& functional,
                                     const HarmonicFunction& h, const PathConfig& cfg);

// occupation-density histogram: Green-function fallback for models without
// closed forms (equal bins over the interval U)
std::vector<EstimatorResult> estimate_green_histogram(const OperatorModel& model,
                                                      const DomainGeometry& U, const Point& x,
                                                      int bins, const PathConfig& cfg);

// ---------------------------------------------------------------------------
// statistical self-checks
// ---------------------------------------------------------------------------

struct HarmonicityRow {
    std::string what;
    double expected, estimate, stderr_;
    bool pass;
};
struct HarmonicityReport {
    std::vector<HarmonicityRow> rows;
    bool pass = true;
};
// mean-value property over shrunk copies of D plus a fixed-time martingale
// probe; statistical gate at 3 stderr
HarmonicityReport check_harmonicity(const OperatorModel& model, const HarmonicFunction& u,
                                    const DomainGeometry& D, long trials,
                                    const PathConfig& cfg);

struct ClosureReport {
    double lhs = 0, phi_x = 0, qv_half = 0, jump_sum = 0;
    double combined_stderr = 0;
    double gap = 0;
    bool pass = false;
    long n_paths = 0;
};
// martingale closure on one ensemble: E phi(u(X_tau)) against
// phi(u(x)) + (1/2) int g d[Y]^c + sum-of-jump divergences
ClosureReport ito_meyer_closure(const OperatorModel& model, const DomainGeometry& U,
                                const Point& x, const HarmonicFunction& u,
                                const ConvexSpec& spec, const PathConfig& cfg);

}  // namespace hslab

#endif
