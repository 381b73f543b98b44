#ifndef SLIM_SKELLAM_HPP
#define SLIM_SKELLAM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "slim/error.hpp"
#include "slim/rng.hpp"

namespace slim {

/// Number of terms kept from the power series of I_v(x).
inline constexpr int kBesselTerms = 50;

/// Rate pair of a Skellam variable y = N1 - N2, N1 ~ Pois(pos), N2 ~ Pois(neg).
struct SkellamRates {
  double pos = 1.0;
  double neg = 1.0;
};

/// Truncated series evaluation of the modified Bessel function I_v(x).
struct BesselSeries {
  double log_value = 0.0;  // log I_v(x)
  double ratio = 0.0;      // I_{v+1}(x) / I_v(x), clamped to [0, 1]
  bool converged = true;   // false when the last retained term is still significant
};

namespace detail {

template <class Real>
Real log_int(std::uint64_t n) {
  static const auto table = [] {
    std::array<Real, 512> t{};
    t[0] = -std::numeric_limits<Real>::infinity();
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = std::log(static_cast<Real>(i));
    return t;
  }();
  return n < table.size() ? table[n] : std::log(static_cast<Real>(n));
}

template <class Real>
Real log_factorial(std::uint64_t n) {
  static const auto table = [] {
    std::array<Real, 512> t{};
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<Real>(i));
    return t;
  }();
  return n < table.size() ? table[n] : std::lgamma(static_cast<Real>(n) + 1);
}

template <class Real>
struct SeriesResult {
  Real log_value = 0;
  Real ratio = 0;
  bool converged = true;
};

/// Log-space evaluation of the first kBesselTerms terms of
///   I_v(x) = sum_k (x/2)^(v+2k) / (k! (v+k)!)
/// together with the ratio I_{v+1}/I_v taken from the same terms.
/// Terms past the peak that fall below e^-40 of the largest one are skipped;
/// they cannot change the sum at double precision.
template <class Real>
SeriesResult<Real> bessel_terms(std::uint64_t order, Real x) {
  SeriesResult<Real> out;
  if (x == 0) {
    out.log_value = order == 0 ? Real(0) : -std::numeric_limits<Real>::infinity();
    return out;
  }
  const Real log_half_x = std::log(x / 2);
  std::array<Real, kBesselTerms> log_terms{};
  Real t = static_cast<Real>(order) * log_half_x - log_factorial<Real>(order);
  Real t_max = t;
  int count = 0;
  for (int k = 0; k < kBesselTerms; ++k) {
    log_terms[k] = t;
    ++count;
    t_max = std::max(t_max, t);
    const Real next = t + 2 * log_half_x - log_int<Real>(static_cast<std::uint64_t>(k) + 1) -
                      log_int<Real>(order + static_cast<std::uint64_t>(k) + 1);
    if (next < t && next < t_max - 40) break;
    t = next;
  }
  Real sum = 0;
  Real weighted = 0;
  for (int k = 0; k < count; ++k) {
    const Real w = std::exp(log_terms[k] - t_max);
    sum += w;
    weighted += w / static_cast<Real>(order + static_cast<std::uint64_t>(k) + 1);
  }
  out.log_value = t_max + std::log(sum);
  out.ratio = std::clamp<Real>(x / 2 * weighted / sum, 0, 1);
  if (count == kBesselTerms) {
    out.converged = log_terms[kBesselTerms - 1] - out.log_value < std::log(Real(1e-12));
  }
  return out;
}

}  // namespace detail

inline BesselSeries bessel_series(std::uint64_t order, double x) {
  const auto r = detail::bessel_terms<double>(order, x);
  return {r.log_value, r.ratio, r.converged};
}

/// log I_order(x) from the truncated series.
inline double log_bessel_i(long long order, double x) {
  if (order < 0) throw UsageError("log_bessel_i: negative order " + std::to_string(order));
  if (!(x >= 0.0)) throw UsageError("log_bessel_i: x must be nonnegative");
  return bessel_series(static_cast<std::uint64_t>(order), x).log_value;
}

inline void check_rates(const SkellamRates& r) {
  if (!std::isfinite(r.pos) || !std::isfinite(r.neg) || r.pos <= 0.0 || r.neg <= 0.0) {
    throw NumericError("Skellam rates must be positive and finite (got " + std::to_string(r.pos) +
                       ", " + std::to_string(r.neg) + ")");
  }
}

namespace detail {

template <class Real>
double skellam_log_pmf_in(long long y, const SkellamRates& rates) {
  check_rates(rates);
  const auto order = static_cast<std::uint64_t>(y < 0 ? -y : y);
  const Real a = rates.pos;
  const Real b = rates.neg;
  const Real x = 2 * std::sqrt(a * b);
  return static_cast<double>(-(a + b) + static_cast<Real>(y) / 2 * (std::log(a) - std::log(b)) +
                             bessel_terms<Real>(order, x).log_value);
}

}  // namespace detail

/// Evaluated in extended precision: the three log-space parts are each of
/// order pos + neg, and rounding them in double leaves a relative error of
/// a few times (pos + neg) * eps in the probability.
inline double skellam_log_pmf(long long y, const SkellamRates& rates) {
  return detail::skellam_log_pmf_in<long double>(y, rates);
}

/// Poisson draw: sequential inversion below rate 30, PTRS transformed
/// rejection (Hormann 1993) above.
template <class Engine>
std::int64_t poisson_sample(double rate, Engine& rng) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw UsageError("poisson_sample: rate must be positive and finite");
  }
  if (rate < 30.0) {
    const double u = uniform01(rng);
    double p = std::exp(-rate);
    double cdf = p;
    std::int64_t k = 0;
    while (u > cdf) {
      ++k;
      p *= rate / static_cast<double>(k);
      const double next = cdf + p;
      if (next == cdf) break;  // tail exhausted in double precision
      cdf = next;
    }
    return k;
  }
  const double slam = std::sqrt(rate);
  const double loglam = std::log(rate);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::abs(u);
    const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + rate + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -rate + static_cast<double>(k) * loglam - std::lgamma(static_cast<double>(k) + 1.0)) {
      return k;
    }
  }
}

template <class Engine>
std::int64_t skellam_sample(const SkellamRates& rates, Engine& rng) {
  const std::int64_t n1 = poisson_sample(rates.pos, rng);
  const std::int64_t n2 = poisson_sample(rates.neg, rng);
  return n1 - n2;
}

}  // namespace slim

#endif  // SLIM_SKELLAM_HPP
