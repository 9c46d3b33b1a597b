#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "bmdlimits/errors.hpp"
#include "bmdlimits/minimax.hpp"
#include "oracles.hpp"

using namespace bmdlimits;
using namespace bmdlimits::minimax;

TEST(HjwBound, MatchesExtendedPrecisionOnRandomGrid) {
  std::mt19937_64 gen(1000);
  std::uniform_real_distribution<double> log_s(std::log(2.0), std::log(1e9));
  std::uniform_real_distribution<double> log_ratio(std::log(1e-4), std::log(100.0));
  std::uniform_real_distribution<double> zd(0.001, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double s = std::round(std::exp(log_s(gen)));
    const double n = std::max(1.0, std::round(s * std::exp(log_ratio(gen))));
    const double z = zd(gen);
    const double want = oracle::hjw_lower_bound(oracle::Real(n), oracle::Real(s), oracle::Real(z)).convert_to<double>();
    EXPECT_NEAR(hjw_lower_bound(n, s, z), want, 1e-12) << n << " " << s << " " << z;
  }
}

TEST(HjwBound, IndicatorSwitch) {
  const double s = 6.14e6;
  const double zeta = 1.0;
  const double n_switch = std::numbers::e / 16.0 * s / (1 + zeta);
  const double above = std::ceil(n_switch + 1);
  const double below = std::floor(n_switch - 1);
  const double tail = std::exp(-zeta * zeta * s / (32 * std::log(s) * std::log(s)));
  EXPECT_NEAR(hjw_lower_bound(above, s, zeta),
              std::sqrt(std::numbers::e * s / ((1 + zeta) * above)) / 8 - std::exp(-above / 24) - 12 * tail, 1e-15);
  EXPECT_NEAR(hjw_lower_bound(below, s, zeta),
              std::exp(-2 * (1 + zeta) * below / s) - std::exp(-below / 24) - 12 * tail, 1e-15);
  const double e16 = hjw_lower_bound(above, s, zeta);
  const double ebelow = hjw_lower_bound(below, s, zeta);
  EXPECT_NEAR(e16, 0.5, 1e-5);
  EXPECT_NEAR(ebelow, std::exp(-std::numbers::e / 8), 1e-5);
}

TEST(HjwBound, TableScaleValue) {
  const double n = 3.73e6;
  const double s = 6.14e6;
  const double want = oracle::hjw_lower_bound(oracle::Real(n), oracle::Real(s), oracle::Real(1)).convert_to<double>();
  EXPECT_NEAR(hjw_lower_bound(n, s, 1.0), want, 1e-12);
  EXPECT_NEAR(hjw_lower_bound(n, s, 1.0), std::sqrt(std::numbers::e * s / (2 * n)) / 8, 1e-12);
}

TEST(HjwBound, NonIncreasingInFirstTermRegime) {
  const double s = 6.14e6;
  for (double z : {0.1, 0.5, 1.0}) {
    double prev = hjw_lower_bound(s, s, z);
    for (double n = s; n < 1e9; n *= 1.3) {
      const double v = hjw_lower_bound(n, s, z);
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(HjwBound, Domain) {
  EXPECT_THROW(hjw_lower_bound(10, 100, 0.0), DomainError);
  EXPECT_THROW(hjw_lower_bound(10, 100, 1.1), DomainError);
  EXPECT_THROW(hjw_lower_bound(0, 100, 0.5), DomainError);
}

TEST(Cantelli, Values) {
  EXPECT_DOUBLE_EQ(cantelli_lambda(0.5), 1.0);
  EXPECT_EQ(cantelli_lambda(0.0), 0.0);
  EXPECT_NEAR(cantelli_lambda(0.05), 0.22942, 5e-6);
  EXPECT_THROW(cantelli_lambda(1.0), DomainError);
  EXPECT_THROW(cantelli_lambda(-0.1), DomainError);
}

TEST(Threshold, UnlimitedTests) {
  MinimaxQuery q;
  q.r = 0.005;
  q.alpha = 0.05;
  EXPECT_NEAR(detection_threshold(q).value, 0.01 + std::sqrt(0.05 / 0.95), 1e-15);
  EXPECT_NEAR(detection_threshold(q).value, 0.23942, 5e-6);
  EXPECT_FALSE(detection_threshold(q).beta);
  q.alpha = 0.0;
  EXPECT_DOUBLE_EQ(detection_threshold(q).value, 0.01);
}

TEST(Threshold, FiniteBudgetIsSmaller) {
  for (double alpha : {0.01, 0.05}) {
    for (double r : {0.005, 0.05}) {
      MinimaxQuery unlimited;
      unlimited.r = r;
      unlimited.alpha = alpha;
      MinimaxQuery finite = unlimited;
      finite.tests = 2000;
      for (auto policy : {BetaPolicy::kMaximizeThreshold, BetaPolicy::kHalfAlpha}) {
        finite.beta_policy = policy;
        EXPECT_LT(detection_threshold(finite).value, detection_threshold(unlimited).value);
      }
    }
  }
}

TEST(Threshold, BetaPolicies) {
  MinimaxQuery q;
  q.r = 0.01;
  q.alpha = 0.05;
  q.tests = 2000;
  q.beta_policy = BetaPolicy::kHalfAlpha;
  const auto half = detection_threshold(q);
  EXPECT_DOUBLE_EQ(*half.beta, 0.025);
  EXPECT_NEAR(half.value, 2 * (std::pow(0.025, 1.0 / 2000) - 1 + 0.01) + std::sqrt(0.025 / 0.975), 1e-14);

  q.beta_policy = BetaPolicy::kMaximizeThreshold;
  const auto best = detection_threshold(q);
  EXPECT_GE(best.value, half.value);
  for (int i = 1; i < 200; ++i) {
    MinimaxQuery probe = q;
    probe.beta = 0.05 * i / 200.0;
    EXPECT_LE(detection_threshold(probe).value, best.value + 1e-12);
  }

  q.beta = 0.05;
  EXPECT_THROW(detection_threshold(q), InfeasibleError);
}

TEST(Threshold, Validation) {
  MinimaxQuery q;
  q.r = 0.0;
  EXPECT_THROW(detection_threshold(q), DomainError);
  q.r = 0.01;
  q.support = 1;
  EXPECT_THROW(detection_threshold(q), DomainError);
  q.support = 100;
  q.zeta = FixedZeta{0.0};
  EXPECT_THROW(detection_threshold(q), DomainError);
  q.zeta = FixedZeta{1.0};
  q.tests = 0;
  EXPECT_THROW(detection_threshold(q), DomainError);
}

TEST(ZetaGrid, LogSpaced) {
  const auto g = zeta_grid_values({});
  ASSERT_EQ(g.size(), 1000u);
  EXPECT_DOUBLE_EQ(g.front(), 0.01);
  EXPECT_EQ(g.back(), 1.0);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    EXPECT_NEAR(std::log(g[i + 1]) - std::log(g[i]), std::log(g[i]) - std::log(g[i - 1]), 1e-12);
  }
  EXPECT_THROW(zeta_grid_values({0, 0.01}), DomainError);
}

TEST(MinTrainingSample, CertificateFixedZeta) {
  for (double alpha : {0.01, 0.05}) {
    for (double r : {0.005, 0.01, 0.03, 0.05}) {
      for (std::optional<std::uint64_t> t : {std::optional<std::uint64_t>{2000}, std::optional<std::uint64_t>{}}) {
        MinimaxQuery q;
        q.r = r;
        q.alpha = alpha;
        q.tests = t;
        const auto rep = min_training_sample(q);
        ASSERT_FALSE(rep.vacuous);
        const double n = static_cast<double>(rep.min_training_n);
        EXPECT_LE(hjw_lower_bound(n, q.support, 1.0), rep.threshold);
        EXPECT_GT(hjw_lower_bound(n - 1, q.support, 1.0), rep.threshold);
        EXPECT_DOUBLE_EQ(rep.bound_at_n, hjw_lower_bound(n, q.support, 1.0));
        EXPECT_DOUBLE_EQ(rep.threshold, detection_threshold(q).value);
      }
    }
  }
}

TEST(MinTrainingSample, GridReportsMaximizingZeta) {
  MinimaxQuery q;
  q.r = 0.03;
  q.alpha = 0.05;
  q.zeta = ZetaGrid{1000, 0.01};
  const auto rep = min_training_sample(q);
  const double n = static_cast<double>(rep.min_training_n);
  double best = -1e300;
  double arg = 0.0;
  for (double z : zeta_grid_values({1000, 0.01})) {
    const double v = hjw_lower_bound(n, q.support, z);
    if (v > best) {
      best = v;
      arg = z;
    }
  }
  EXPECT_EQ(rep.zeta_used, arg);
  EXPECT_EQ(rep.bound_at_n, best);
  EXPECT_LE(rep.bound_at_n, rep.threshold);
  EXPECT_GT(rep.bound_at_previous, rep.threshold);

  MinimaxQuery fixed = q;
  fixed.zeta = FixedZeta{1.0};
  EXPECT_GE(rep.min_training_n, min_training_sample(fixed).min_training_n);
}

TEST(MinTrainingSample, MonotoneInRAndConfidence) {
  std::uint64_t prev = UINT64_MAX;
  for (double r : {0.005, 0.01, 0.03, 0.05}) {
    MinimaxQuery q;
    q.r = r;
    q.alpha = 0.01;
    const auto n = min_training_sample(q).min_training_n;
    EXPECT_LE(n, prev);
    prev = n;
    MinimaxQuery looser = q;
    looser.alpha = 0.05;
    EXPECT_LE(min_training_sample(looser).min_training_n, n);
  }
}

TEST(MinTrainingSample, VacuousAndInfeasible) {
  MinimaxQuery q;
  q.r = 0.45;
  q.alpha = 0.9;
  const auto rep = min_training_sample(q);
  EXPECT_TRUE(rep.vacuous);
  EXPECT_EQ(rep.min_training_n, 1u);

  MinimaxQuery none;
  none.r = 1e-6;
  none.alpha = 0.01;
  none.tests = 1'000'000;
  none.beta = 0.0;
  EXPECT_THROW(min_training_sample(none), InfeasibleError);
}
