#ifndef HSLAB_RNG_HPP
#define HSLAB_RNG_HPP

#include <cstdint>

namespace hslab {

// xoshiro256++ with SplitMix64 stream derivation. All samplers below are
// hand-rolled transforms of the raw stream, so results are bit-reproducible
// across platforms and standard-library versions. Streams are keyed by
// (master seed, batch index): estimates do not depend on the worker count.
class Rng {
  public:
    explicit Rng(uint64_t seed);
    static Rng for_batch(uint64_t master_seed, uint64_t batch);

    uint64_t next_u64();
    double uniform();                       // (0,1)
    double uniform(double a, double b);
    bool bernoulli(double p) { return uniform() < p; }
    double normal();                        // standard, Box-Muller
    double exponential();                   // rate 1
    double gamma(double shape);             // scale 1, Marsaglia-Tsang
    double beta(double a, double b);
    int poisson(double mean);
    // standard symmetric alpha-stable, characteristic fn exp(-|xi|^alpha)
    double stable_symmetric(double alpha);
    // one-sided alpha'-stable subordinator, Laplace exp(-lambda^{alpha'}), alpha' in (0,1)
    double stable_positive(double alpha_prime);

  private:
    uint64_t s_[4];
    double spare_normal_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace hslab

#endif
