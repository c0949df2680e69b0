#include "schedpred/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace schedpred {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

bool bernoulli(Rng& rng, const Rational& p) {
    if (p.num() <= 0) return false;
    if (p.num() >= p.den()) return true;
    const unsigned __int128 draw = rng();
    // draw / 2^64 < num / den
    return draw * static_cast<unsigned __int128>(p.den()) <
           (static_cast<unsigned __int128>(p.num()) << 64);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform_open0(Rng& rng) { return 1.0 - uniform01(rng); }

double exponential(Rng& rng, double mean) {
    if (!(mean > 0.0)) throw std::domain_error("exponential mean must be positive");
    return -mean * std::log(uniform_open0(rng));
}

double standard_normal(Rng& rng) {
    const double u1 = uniform_open0(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double gamma(Rng& rng, double shape) {
    if (!(shape > 0.0)) throw std::domain_error("gamma shape must be positive");
    if (shape < 1.0) {
        // boost to shape + 1, then scale by U^(1/shape)
        const double g = gamma(rng, shape + 1.0);
        return g * std::pow(uniform_open0(rng), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open0(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double beta_variate(Rng& rng, double a, double b) {
    const double x = gamma(rng, a);
    const double y = gamma(rng, b);
    return x / (x + y);
}

}  // namespace schedpred
