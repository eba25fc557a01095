#include "hslab/rng.hpp"

#include <cmath>

namespace hslab {

namespace {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

const double kPi = 3.14159265358979323846264338327950288;

}  // namespace

Rng::Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

Rng Rng::for_batch(uint64_t master_seed, uint64_t batch) {
    uint64_t sm = master_seed;
    uint64_t base = splitmix64(sm);
    // decorrelate batches by running the mixer on (mixed master) xor batch tag
    uint64_t tag = base ^ (0xA3EC647659359ACDull * (batch + 1));
    return Rng(tag);
}

uint64_t Rng::next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    // 53-bit mantissa, shifted into (0,1): never returns 0 or 1
    return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_normal_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * kPi * u2;
    spare_normal_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::gamma(double shape) {
    if (shape < 1.0) {
        // boost to shape+1 then scale back
        double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
}

int Rng::poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
        // multiplication method
        double l = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > l);
        return k - 1;
    }
    // normal approximation with continuity correction; adequate for the
    // large-rate regime (used only when a step holds many big jumps)
    double v = mean + std::sqrt(mean) * normal() + 0.5;
    return v < 0.0 ? 0 : static_cast<int>(v);
}

double Rng::stable_symmetric(double alpha) {
    // Chambers-Mallows-Stuck, beta = 0, scale 1
    double v = uniform(-0.5 * kPi, 0.5 * kPi);
    double w = exponential();
    if (alpha == 1.0) return std::tan(v);
    double t = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
    double s = std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
    return t * s;
}

double Rng::stable_positive(double alpha_prime) {
    // Kanter's sampler for the one-sided stable law on (0,inf)
    const double a = alpha_prime;
    double v = uniform(0.0, kPi);
    double w = exponential();
    double lead = std::sin(a * v) / std::pow(std::sin(v), 1.0 / a);
    return lead * std::pow(std::sin((1.0 - a) * v) / w, (1.0 - a) / a);
}

}  // namespace hslab
