#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "bmdlimits/errors.hpp"
#include "bmdlimits/stats.hpp"
#include "oracles.hpp"

using namespace bmdlimits;
using namespace bmdlimits::stats;

TEST(PoissonTail, MatchesExtendedPrecisionOracle) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> log_mean(std::log(0.05), std::log(5000.0));
  for (int i = 0; i < 200; ++i) {
    const double mean = std::exp(log_mean(gen));
    const auto spread = static_cast<std::int64_t>(6 * std::sqrt(mean) + 5);
    std::uniform_int_distribution<std::int64_t> kd(0, static_cast<std::int64_t>(mean) + spread);
    const std::int64_t k = kd(gen);
    const double want = oracle::poisson_cdf(oracle::Real(mean), k).convert_to<double>();
    EXPECT_NEAR(poisson_cdf({mean}, k), want, 1e-12) << "mean=" << mean << " k=" << k;
    EXPECT_NEAR(poisson_sf({mean}, static_cast<std::uint64_t>(k) + 1), 1.0 - want, 1e-12);
  }
}

TEST(PoissonTail, FarTailsKeepRelativeAccuracy) {
  const double mean = 250.0;
  const double want = (1 - oracle::poisson_cdf(oracle::Real(mean), 399)).convert_to<double>();
  EXPECT_NEAR(poisson_sf({mean}, 400) / want, 1.0, 1e-10);
  const double lo = oracle::poisson_cdf(oracle::Real(mean), 120).convert_to<double>();
  EXPECT_NEAR(poisson_cdf({mean}, 120) / lo, 1.0, 1e-10);
}

TEST(PoissonTail, EdgeCases) {
  EXPECT_EQ(poisson_sf({3.0}, 0), 1.0);
  EXPECT_EQ(poisson_cdf({3.0}, -1), 0.0);
  EXPECT_EQ(poisson_cdf({0.0}, 0), 1.0);
  EXPECT_EQ(poisson_sf({0.0}, 1), 0.0);
  EXPECT_THROW(poisson_sf({-1.0}, 2), DomainError);
  EXPECT_THROW(poisson_cdf({std::numeric_limits<double>::infinity()}, 2), DomainError);
}

TEST(PoissonQuantile, IsSmallestSatisfyingK) {
  for (double mean : {0.3, 4.0, 37.5, 250.0, 4513.0, 90000.0}) {
    for (double alpha : {0.01, 0.05, 0.5, 0.9}) {
      const auto k = poisson_upper_quantile({mean}, alpha);
      EXPECT_LE(poisson_sf({mean}, k), alpha);
      if (k > 0) EXPECT_GT(poisson_sf({mean}, k - 1), alpha) << mean << " " << alpha;
    }
  }
  EXPECT_THROW(poisson_upper_quantile({1.0}, 0.0), DomainError);
  EXPECT_THROW(poisson_upper_quantile({1.0}, 1.0), DomainError);
}

TEST(PoissonMeanForCdf, InvertsTheCdf) {
  for (std::uint64_t k : {0ull, 1ull, 17ull, 2335ull, 60000ull}) {
    for (double target : {0.01, 0.05, 0.95, 0.99}) {
      const double m = poisson_mean_for_cdf(k, target);
      EXPECT_NEAR(poisson_cdf({m}, static_cast<std::int64_t>(k)), target, 1e-12);
    }
  }
  EXPECT_NEAR(poisson_mean_for_cdf(0, 0.05), -std::log(0.05), 1e-12);
}

TEST(NoReplacementMiss, MatchesExactRational) {
  for (auto [v, f, n] : {std::tuple{2980ull, 15ull, 539ull}, {2980ull, 15ull, 538ull}, {100ull, 1ull, 50ull},
                         {50ull, 10ull, 40ull}, {6160ull, 31ull, 572ull}}) {
    const double want = oracle::no_replacement_miss(v, f, n).convert_to<double>();
    EXPECT_NEAR(no_replacement_miss_prob(v, f, n) / want, 1.0, 1e-12) << v << "," << f << "," << n;
  }
}

TEST(NoReplacementMiss, Boundaries) {
  EXPECT_EQ(no_replacement_miss_prob(10, 0, 10), 1.0);
  EXPECT_EQ(no_replacement_miss_prob(10, 3, 8), 0.0);
  EXPECT_EQ(log_no_replacement_miss(10, 3, 0).value, 0.0);
  EXPECT_TRUE(std::isinf(log_no_replacement_miss(10, 10, 1).value));
  EXPECT_THROW(no_replacement_miss_prob(5, 6, 1), DomainError);
}

TEST(BinomialTail, MatchesOracle) {
  std::mt19937_64 gen(7);
  for (int i = 0; i < 60; ++i) {
    const std::uint64_t n = std::uniform_int_distribution<std::uint64_t>(1, 3000)(gen);
    const double p = std::uniform_real_distribution<double>(0.001, 0.999)(gen);
    const std::uint64_t k = std::uniform_int_distribution<std::uint64_t>(0, n + 1)(gen);
    const double want = oracle::binomial_sf(n, oracle::Real(p), k).convert_to<double>();
    EXPECT_NEAR(binomial_sf(n, p, k), want, 1e-12) << n << " " << p << " " << k;
  }
  EXPECT_EQ(binomial_sf(10, 0.0, 1), 0.0);
  EXPECT_EQ(binomial_sf(10, 1.0, 10), 1.0);
  EXPECT_THROW(binomial_sf(10, 1.5, 1), DomainError);
}

TEST(Search, FirstTrueFindsBoundary) {
  EXPECT_EQ(first_true<int>(0, 100, [](int x) { return x >= 37; }), 37);
  EXPECT_EQ(first_true<int>(0, 100, [](int x) { return x >= 0; }), 0);
  EXPECT_FALSE(first_true<int>(0, 100, [](int x) { return x > 100; }));
  EXPECT_EQ(first_true_unbounded<std::uint64_t>(1, 1ull << 40, [](std::uint64_t x) { return x >= 123456789; }),
            123456789u);
  EXPECT_FALSE(first_true_unbounded<std::uint64_t>(1, 1000, [](std::uint64_t) { return false; }));
}
