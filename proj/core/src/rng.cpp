#include "oranfl/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oranfl {

namespace {

// splitmix64 finalizer; good avalanche for stream derivation.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ mix64(a + 0x100000001b3ull));
    s = mix64(s ^ mix64(b + 0x1000193ull));
    s = mix64(s ^ mix64(c + 0x811c9dc5ull));
    return Rng(s);
}

std::uint64_t Rng::next_u64() {
    ++draws_;
    return gen_();
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("Rng::uniform_int: n must be positive");
    }
    // Rejection sampling over the largest multiple of n.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - n + 1;
    std::uint64_t x, r;
    do {
        x = next_u64();
        r = x % n;
    } while (x - r > limit);
    return r;
}

double Rng::exponential(double mean) {
    if (!(mean > 0.0)) {
        throw std::invalid_argument("Rng::exponential: mean must be positive");
    }
    // uniform() < 1, so log1p(-u) is finite; result >= 0.
    return -mean * std::log1p(-uniform());
}

double Rng::normal(double mean, double stddev) {
    // Box-Muller; u1 shifted away from 0 to keep the log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + stddev * z;
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) {
        throw std::invalid_argument("Rng::gamma: shape must be positive");
    }
    if (shape < 1.0) {
        // Boost: G(a) = G(a+1) * U^(1/a).
        const double u = 1.0 - uniform();   // (0, 1]
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = 1.0 - uniform();   // (0, 1]
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

std::vector<double> Rng::dirichlet(double alpha, int k) {
    if (k < 1) {
        throw std::invalid_argument("Rng::dirichlet: k must be positive");
    }
    std::vector<double> p(k);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        p[i] = gamma(alpha);
        total += p[i];
    }
    if (total <= 0.0) {
        // All-zero draw is possible only through underflow at tiny alpha.
        for (double& v : p) v = 1.0 / k;
        return p;
    }
    for (double& v : p) v /= total;
    return p;
}

}  // namespace oranfl
