#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace hsp {

// All stochastic code takes an explicit stream; nothing draws from hidden
// global state. Replicate-level parallelism hands each worker its own stream
// derived from (master seed, replicate index).
using RandomStream = std::mt19937_64;

/// splitmix64 finalizer; a cheap, well-mixed 64-bit hash.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for replicate `index` under `master`. Pure function of its
/// arguments, so aggregation is independent of worker scheduling.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) noexcept;

RandomStream make_stream(std::uint64_t seed);

/// Uniform draw strictly inside (0, 1).
double uniform01(RandomStream& rng);

/// Exponential(1) draw.
double exponential1(RandomStream& rng);

/// One pair of independent standard normals (Box-Muller).
std::pair<double, double> normal_pair(RandomStream& rng);

/// Single standard normal; draws a full Box-Muller pair and discards half.
double normal1(RandomStream& rng);

/// Gamma(shape, rate) draw via Marsaglia-Tsang squeeze.
double gamma_rate(RandomStream& rng, double shape, double rate);

}  // namespace hsp
