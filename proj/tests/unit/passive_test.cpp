#include <gtest/gtest.h>

#include "bmdlimits/errors.hpp"
#include "bmdlimits/passive.hpp"
#include "bmdlimits/stats.hpp"
#include "oracles.hpp"

using namespace bmdlimits;
using namespace bmdlimits::passive;

namespace {

// Linear scan from N = 1: the first N admitting a feasible threshold.
std::uint64_t scan_min_size(const PassiveDesign& d, std::uint64_t limit) {
  for (std::uint64_t n = 1; n <= limit; ++n) {
    if (feasible_threshold(n, d)) return n;
  }
  return 0;
}

}  // namespace

TEST(PassivePower, AgreesWithOracle) {
  const PassiveDesign d{0.03, 0.07, 0.005};
  const std::uint64_t n = 52310;
  const std::uint64_t k = 280;
  const auto e = passive_power(n, d, k);
  const oracle::Real base = oracle::Real(n) * 0.005;
  const oracle::Real attacked = oracle::Real(n) * (0.005 + 0.015 * 0.07);
  EXPECT_NEAR(e.fp, (1 - oracle::poisson_cdf(base, k)).convert_to<double>(), 1e-12);
  EXPECT_NEAR(e.fn, oracle::poisson_cdf(attacked, k - 1).convert_to<double>(), 1e-12);

  PassiveDesign strict = d;
  strict.convention = ThresholdConvention::kStrict;
  EXPECT_NEAR(passive_power(n, strict, k).fp, (1 - oracle::poisson_cdf(base, k - 1)).convert_to<double>(), 1e-12);
}

TEST(PassivePower, RejectsBadInput) {
  EXPECT_THROW(passive_power(100, {0.01, 0.07, 0.0}, 3), DomainError);
  EXPECT_THROW(passive_power(100, {0.01, 0.07, 0.005}, 0), DomainError);
  EXPECT_THROW(passive_power(100, {1.0, 0.07, 0.005}, 3), DomainError);
  EXPECT_THROW(passive_power(100, {0.01, 0.07, 0.005, 0.0}, 3), DomainError);
}

TEST(AlarmThreshold, MeetsFalsePositiveBudget) {
  for (auto conv : {ThresholdConvention::kStrict, ThresholdConvention::kBoundaryExcluded}) {
    PassiveDesign d{0.02, 0.25, 0.01};
    d.convention = conv;
    for (std::uint64_t n : {10ull, 500ull, 9919ull, 250000ull}) {
      const auto k = alarm_threshold(n, d);
      EXPECT_LE(passive_power(n, d, k).fp, d.fp_budget);
      if (k > 1) EXPECT_GT(passive_power(n, d, k - 1).fp, d.fp_budget);
    }
  }
}

TEST(MinContestSize, KnownCells) {
  EXPECT_EQ(min_contest_size({0.01, 0.07, 0.005}).contest_size, 451411u);
  EXPECT_EQ(min_contest_size({0.05, 0.25, 0.015}).contest_size, 4689u);
  EXPECT_EQ(min_contest_size({0.01, 0.07, 0.005, 0.01, 0.01}).contest_size, 908590u);
  EXPECT_EQ(min_contest_size({0.05, 0.25, 0.015, 0.01, 0.01}).contest_size, 9650u);
}

TEST(MinContestSize, CertificateHolds) {
  for (double margin : {0.01, 0.03, 0.05}) {
    for (double det : {0.07, 0.25}) {
      const PassiveDesign d{margin, det, 0.01};
      const auto s = min_contest_size(d);
      EXPECT_TRUE(s.minimality_certified);
      EXPECT_LE(s.achieved_fp, d.fp_budget);
      EXPECT_LE(s.achieved_fn, d.fn_budget);
      EXPECT_FALSE(feasible_threshold(s.contest_size - 1, d));
      EXPECT_EQ(feasible_threshold(s.contest_size, d), s.alarm_threshold);
    }
  }
}

// The threshold scan must find the global minimum, including feasibility
// pockets below larger infeasible stretches.
TEST(MinContestSize, MatchesLinearScanOracle) {
  std::vector<PassiveDesign> designs;
  for (auto conv : {ThresholdConvention::kBoundaryExcluded, ThresholdConvention::kStrict}) {
    for (double budget : {0.01, 0.05, 0.1}) {
      for (double det : {0.25, 0.5, 0.9}) {
        for (double base : {0.005, 0.02}) {
          designs.push_back({0.05, det, base, budget, budget, conv});
        }
      }
    }
    designs.push_back({0.2, 0.5, 0.01, 0.05, 0.1, conv});
    designs.push_back({0.1, 0.3, 0.01, 0.1, 0.02, conv});
  }
  for (const auto& d : designs) {
    const auto s = min_contest_size(d);
    if (s.contest_size > 20000) continue;
    EXPECT_EQ(s.contest_size, scan_min_size(d, 20000))
        << "det=" << d.detect_rate << " base=" << d.base_rate << " fp=" << d.fp_budget << " "
        << to_string(d.convention);
  }
}

TEST(MinContestSize, MonotoneInDesign) {
  const auto n = [](double m, double det, double b) { return min_contest_size({m, det, b}).contest_size; };
  EXPECT_GT(n(0.01, 0.25, 0.01), n(0.02, 0.25, 0.01));
  EXPECT_GT(n(0.02, 0.07, 0.01), n(0.02, 0.25, 0.01));
  EXPECT_LT(n(0.02, 0.25, 0.005), n(0.02, 0.25, 0.01));
}

TEST(MinContestSize, InvisibleAttackIsInfeasible) {
  EXPECT_THROW(min_contest_size({0.0, 0.25, 0.01}), InfeasibleError);
  EXPECT_THROW(min_contest_size({0.02, 0.0, 0.01}), InfeasibleError);
}

TEST(PassiveTable, LayoutAndValues) {
  const auto t = table_passive(0.05, {0.01, 0.05}, {0.07, 0.25}, {0.005, 0.015});
  ASSERT_EQ(t.cells.size(), 8u);
  EXPECT_EQ(t.at(0, 0, 0).solution->contest_size, 451411u);
  EXPECT_EQ(t.at(1, 1, 1).solution->contest_size, 4689u);
  EXPECT_DOUBLE_EQ(t.at(1, 0, 1).margin, 0.05);
  EXPECT_DOUBLE_EQ(t.at(1, 0, 1).detect_rate, 0.07);
  EXPECT_DOUBLE_EQ(t.at(1, 0, 1).base_rate, 0.015);

  const auto with_zero = table_passive(0.05, {0.0, 0.01}, {0.25}, {0.01});
  EXPECT_FALSE(with_zero.cells[0].solution);
  EXPECT_FALSE(with_zero.cells[0].error.empty());
  EXPECT_TRUE(with_zero.cells[1].solution);
  EXPECT_THROW(table_passive(0.05, {}, {0.25}, {0.01}), DomainError);
  EXPECT_THROW(table_passive(0.05, {0.01}, {0.25}, {0.0}), DomainError);
}
