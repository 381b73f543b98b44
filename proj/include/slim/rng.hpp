#ifndef SLIM_RNG_HPP
#define SLIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace slim {

/// SplitMix64. Small, fast, and fully specified, so streams are identical
/// across standard library implementations.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Stateless mix of a key tuple into a seed. Used for counter-based streams
/// keyed by (seed, i, j).
constexpr std::uint64_t mix_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0) noexcept {
  auto fmix = [](std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
  };
  std::uint64_t h = fmix(seed ^ 0x243f6a8885a308d3ULL);
  h = fmix(h ^ (a + 0x13198a2e03707344ULL));
  h = fmix(h ^ (b + 0xa4093822299f31d0ULL));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine.
template <class Engine>
double uniform01(Engine& rng) {
  static_assert(Engine::max() == std::numeric_limits<std::uint64_t>::max());
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1).
template <class Engine>
double uniform_open01(Engine& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by multiply-shift (Lemire), with rejection.
template <class Engine>
std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const unsigned __int128 m =
        static_cast<unsigned __int128>(rng()) * static_cast<unsigned __int128>(n);
    if (static_cast<std::uint64_t>(m) >= threshold)
      return static_cast<std::uint64_t>(m >> 64);
  }
}

/// Standard normal by the polar Box-Muller method.
template <class Engine>
double standard_normal(Engine& rng) {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

/// Gamma(shape, 1) by Marsaglia-Tsang, with the shape < 1 boost.
template <class Engine>
double gamma_sample(double shape, Engine& rng) {
  if (shape < 1.0) {
    const double u = uniform_open01(rng);
    return gamma_sample(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
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
    const double u = uniform_open01(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace slim

#endif  // SLIM_RNG_HPP
