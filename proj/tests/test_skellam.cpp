#include <cmath>
#include <limits>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <gtest/gtest.h>

#include "support.hpp"

namespace {

using slim::SkellamRates;

TEST(Bessel, MatchesExtendedPrecisionSeries) {
  double worst = 0.0;
  for (unsigned nu = 0; nu <= 60; nu += 3) {
    for (double x = 0.25; x <= 30.0; x += 0.25) {
      const double got = slim::log_bessel_i(nu, x);
      const double want = testing_support::big_log_bessel(nu, x);
      worst = std::max(worst, std::abs(std::expm1(got - want)));
    }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Bessel, ValuesAtZero) {
  EXPECT_EQ(slim::log_bessel_i(0, 0.0), 0.0);
  EXPECT_EQ(slim::log_bessel_i(3, 0.0), -std::numeric_limits<double>::infinity());
}

TEST(Bessel, KnownValue) {
  // I_0(1) = 1.2660658777520082
  EXPECT_NEAR(std::exp(slim::log_bessel_i(0, 1.0)), 1.2660658777520082, 1e-15);
}

TEST(Bessel, RatioMatchesConsecutiveOrders) {
  for (unsigned nu : {0u, 1u, 5u, 20u}) {
    for (double x : {0.1, 1.0, 7.5, 25.0}) {
      const auto s = slim::bessel_series(nu, x);
      const double want = std::exp(slim::log_bessel_i(nu + 1, x) - s.log_value);
      EXPECT_NEAR(s.ratio, want, 1e-12 * std::max(1.0, want)) << "nu=" << nu << " x=" << x;
      EXPECT_TRUE(s.converged);
    }
  }
}

TEST(Bessel, ReportsTruncationForHugeArguments) {
  EXPECT_FALSE(slim::bessel_series(0, 400.0).converged);
}

TEST(Bessel, RejectsNegativeOrder) {
  EXPECT_THROW(slim::log_bessel_i(-1, 1.0), slim::UsageError);
  EXPECT_THROW(slim::log_bessel_i(0, -1.0), slim::UsageError);
}

TEST(SkellamPmf, MatchesPoissonDifferenceConvolution) {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.3, 0.7}, {2.0, 1.0}, {4.5, 6.0}}) {
    const boost::math::poisson_distribution<double> pa(a), pb(b);
    for (long long y = -8; y <= 8; ++y) {
      double want = 0.0;
      for (long long m = 0; m < 200; ++m) {
        const long long n1 = m + y;
        if (n1 < 0) continue;
        want += boost::math::pdf(pa, static_cast<double>(n1)) * boost::math::pdf(pb, static_cast<double>(m));
      }
      const double got = std::exp(slim::skellam_log_pmf(y, {a, b}));
      EXPECT_NEAR(got, want, 1e-13 + 1e-11 * want) << "y=" << y << " rates " << a << "," << b;
    }
  }
}

TEST(SkellamPmf, NormalizesOnGrid) {
  for (double a : {0.1, 1.0, 5.0, 20.0}) {
    for (double b : {0.1, 1.0, 5.0, 20.0}) {
      double total = 0.0;
      for (long long y = -200; y <= 200; ++y) total += std::exp(slim::skellam_log_pmf(y, {a, b}));
      EXPECT_NEAR(total, 1.0, 1e-10) << a << "," << b;
    }
  }
}

TEST(SkellamPmf, SwappingRatesMirrorsSupport) {
  for (long long y = -5; y <= 5; ++y) {
    EXPECT_NEAR(slim::skellam_log_pmf(y, {1.3, 0.4}), slim::skellam_log_pmf(-y, {0.4, 1.3}), 1e-12);
  }
}

TEST(SkellamPmf, RejectsInvalidRates) {
  EXPECT_THROW(slim::skellam_log_pmf(0, {0.0, 1.0}), slim::NumericError);
  EXPECT_THROW(slim::skellam_log_pmf(0, {1.0, -2.0}), slim::NumericError);
  EXPECT_THROW(slim::skellam_log_pmf(0, {std::nan(""), 1.0}), slim::NumericError);
  EXPECT_THROW(slim::skellam_log_pmf(0, {std::numeric_limits<double>::infinity(), 1.0}), slim::NumericError);
}

double chi_square_p_value(const std::map<long long, int>& counts, int draws, const SkellamRates& r, long long lo,
                          long long hi) {
  // Bins lo..hi plus two tails.
  double stat = 0.0;
  double inner = 0.0;
  int observed_inner = 0;
  for (long long y = lo; y <= hi; ++y) {
    const double p = std::exp(slim::skellam_log_pmf(y, r));
    inner += p;
    const auto it = counts.find(y);
    const int o = it == counts.end() ? 0 : it->second;
    observed_inner += o;
    const double e = p * draws;
    stat += (o - e) * (o - e) / e;
  }
  const double tail_e = (1.0 - inner) * draws;
  const double tail_o = draws - observed_inner;
  int bins = static_cast<int>(hi - lo + 1);
  if (tail_e > 5.0) {
    stat += (tail_o - tail_e) * (tail_o - tail_e) / tail_e;
    ++bins;
  }
  const boost::math::chi_squared_distribution<double> chi(bins - 1);
  return boost::math::cdf(boost::math::complement(chi, stat));
}

TEST(SkellamSampler, MatchesPmf) {
  for (const SkellamRates r : {SkellamRates{2.0, 1.5}, SkellamRates{0.2, 0.05}, SkellamRates{40.0, 35.0}}) {
    slim::SplitMix64 rng(99);
    std::map<long long, int> counts;
    const int draws = 40000;
    for (int t = 0; t < draws; ++t) ++counts[slim::skellam_sample(r, rng)];
    // Bins whose expected count exceeds 5.
    long long lo = 0, hi = 0;
    while (std::exp(slim::skellam_log_pmf(lo - 1, r)) * draws > 5) --lo;
    while (std::exp(slim::skellam_log_pmf(hi + 1, r)) * draws > 5) ++hi;
    EXPECT_GT(chi_square_p_value(counts, draws, r, lo, hi), 0.001) << r.pos << "," << r.neg;
  }
}

TEST(PoissonSampler, LargeMeanMoments) {
  slim::SplitMix64 rng(5);
  const double rate = 250.0;
  double sum = 0.0, sq = 0.0;
  const int draws = 50000;
  for (int t = 0; t < draws; ++t) {
    const double k = static_cast<double>(slim::poisson_sample(rate, rng));
    sum += k;
    sq += k * k;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  EXPECT_NEAR(mean, rate, 4.0 * std::sqrt(rate / draws));
  EXPECT_NEAR(var / rate, 1.0, 0.05);
}

TEST(PoissonSampler, RejectsBadRates) {
  slim::SplitMix64 rng(1);
  EXPECT_THROW(slim::poisson_sample(0.0, rng), slim::UsageError);
  EXPECT_THROW(slim::poisson_sample(-1.0, rng), slim::UsageError);
}

}  // namespace
