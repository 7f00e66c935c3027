#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace oranfl {

// Deterministic random stream. Distribution transforms are implemented here
// instead of with std::*_distribution so that draws do not depend on the
// standard library implementation. Streams derived with Rng::stream() are
// independent of each other and of the order in which they are consumed,
// which keeps per-client randomness identical no matter how the round loop
// is scheduled.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Derives an independent stream from (seed, a, b, c), e.g.
    // (experiment seed, purpose tag, round, client id).
    static Rng stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                      std::uint64_t c = 0);

    std::uint64_t next_u64();

    // Number of raw 64-bit draws consumed so far.
    std::uint64_t draw_count() const { return draws_; }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n); n must be positive.
    std::uint64_t uniform_int(std::uint64_t n);

    // Exponential with the given mean (Rayleigh-fading power when applied to
    // a mean linear SNR).
    double exponential(double mean);

    // Standard normal scaled to (mean, stddev); Box-Muller, two uniforms per
    // draw, no state carried between calls.
    double normal(double mean = 0.0, double stddev = 1.0);

    // Gamma(shape, 1): Marsaglia-Tsang, boosted for shape < 1. Used for
    // Dirichlet label-skew splits.
    double gamma(double shape);

    // Dirichlet(alpha) over k categories.
    std::vector<double> dirichlet(double alpha, int k);

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_int(i)]);
        }
    }

  private:
    std::mt19937_64 gen_;
    std::uint64_t draws_ = 0;
};

}  // namespace oranfl
