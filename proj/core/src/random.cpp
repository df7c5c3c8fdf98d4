#include "hsp/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hsp {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 1));
}

RandomStream make_stream(std::uint64_t seed) { return RandomStream(seed); }

double uniform01(RandomStream& rng) {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are unreachable
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double exponential1(RandomStream& rng) { return -std::log(uniform01(rng)); }

std::pair<double, double> normal_pair(RandomStream& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

double normal1(RandomStream& rng) { return normal_pair(rng).first; }

double gamma_rate(RandomStream& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("gamma_rate: shape and rate must be positive");
  }
  if (shape < 1.0) {
    // boost to shape+1 and thin with U^(1/shape)
    const double g = gamma_rate(rng, shape + 1.0, 1.0);
    return g * std::pow(uniform01(rng), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0, v = 0.0;
    do {
      x = normal1(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

}  // namespace hsp
