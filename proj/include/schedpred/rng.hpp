#pragma once

#include "schedpred/rational.hpp"

#include <cstdint>
#include <random>

namespace schedpred {

/// The engine's output sequence is fixed by the standard, so streams are
/// reproducible across platforms. Distributions below avoid the
/// implementation-defined std:: distribution objects for the same reason.
using Rng = std::mt19937_64;

/// Seed for stream `index` under a master seed (splitmix64 mixing).
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

[[nodiscard]] inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(stream_seed(seed, index));
}

/// Exact Bernoulli(p) for rational p in [0, 1]: compares a 64-bit draw
/// against p * 2^64 without rounding.
[[nodiscard]] bool bernoulli(Rng& rng, const Rational& p);

/// Uniform on [0, 1) with 53 random bits.
[[nodiscard]] double uniform01(Rng& rng);

/// Uniform on (0, 1].
[[nodiscard]] double uniform_open0(Rng& rng);

[[nodiscard]] double exponential(Rng& rng, double mean);

[[nodiscard]] double standard_normal(Rng& rng);

/// Gamma(shape, 1) by Marsaglia and Tsang.
[[nodiscard]] double gamma(Rng& rng, double shape);

[[nodiscard]] double beta_variate(Rng& rng, double a, double b);

}  // namespace schedpred
