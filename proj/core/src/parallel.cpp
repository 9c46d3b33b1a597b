#include "bmdlimits/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bmdlimits/errors.hpp"
#include "bmdlimits/stats.hpp"

namespace bmdlimits::parallel {
namespace {

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

void require_open_unit(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError(std::string(what) + " must lie in (0, 1)");
}

constexpr std::uint64_t kMaxBmds = 100'000'000;

}  // namespace

double detection_prob_iid(double p, std::uint64_t n) {
  require_probability(p, "p");
  if (n == 0 || p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-p));
}

std::uint64_t min_tests_iid(double p, double confidence) {
  require_probability(p, "p");
  require_open_unit(confidence, "confidence");
  if (p == 0.0) throw InfeasibleError("p = 0: no number of tests can detect the attack");
  if (p == 1.0) return 1;
  auto t = static_cast<std::uint64_t>(
      std::max(1.0, std::ceil(std::log1p(-confidence) / std::log1p(-p))));
  while (t > 1 && detection_prob_iid(p, t - 1) >= confidence) --t;
  while (detection_prob_iid(p, t) < confidence) ++t;
  return t;
}

OracleBound oracle_min_samples(const OracleBoundQuery& q) {
  require_open_unit(q.confidence, "confidence");
  if (q.flawed > q.population) throw DomainError("flawed count exceeds population");
  if (q.flawed == 0) throw InfeasibleError("no flawed printouts: nothing to detect");
  const double log_target = std::log1p(-q.confidence);
  const double f = static_cast<double>(q.flawed);
  double acc = 0.0;
  for (std::uint64_t n = 1;; ++n) {
    const double previous = acc;
    acc += std::log1p(-f / static_cast<double>(q.population - (n - 1)));
    if (acc <= log_target || n > q.population - q.flawed) {
      return {n, std::exp(acc), std::exp(previous)};
    }
  }
}

std::string to_string(SamplingConvention c) {
  return c == SamplingConvention::kWithReplacement
             ? "with-replacement (detection = 1-(1-r)^tests)"
             : "without-replacement (F = round-half-up(r*voters), tests sample voter transactions)";
}

double budgeted_detection(const BudgetedTestQuery& q, std::uint64_t bmds) {
  const std::uint64_t voters = bmds * q.bmd_daily_capacity;
  const std::uint64_t tests = bmds * q.tests_per_bmd_per_day;
  if (q.convention == SamplingConvention::kWithReplacement) {
    return detection_prob_iid(q.altered_fraction, tests);
  }
  const auto flawed =
      static_cast<std::uint64_t>(std::floor(q.altered_fraction * static_cast<double>(voters) + 0.5));
  return 1.0 - stats::no_replacement_miss_prob(voters, flawed, tests);
}

ElectorateSize min_electorate_for_budget(const BudgetedTestQuery& q) {
  if (q.tests_per_bmd_per_day == 0 || q.bmd_daily_capacity == 0) {
    throw DomainError("tests per machine and machine capacity must be positive");
  }
  if (q.tests_per_bmd_per_day > q.bmd_daily_capacity) {
    throw DomainError("tests per machine exceed machine capacity");
  }
  if (!(q.altered_fraction > 0.0 && q.altered_fraction <= 1.0)) {
    throw DomainError("altered fraction must lie in (0, 1]");
  }
  require_open_unit(q.confidence, "confidence");

  // Without replacement the rounding of F makes detection slightly
  // non-monotone in the machine count, so scan rather than bisect.
  std::uint64_t bmds = 1;
  while (budgeted_detection(q, bmds) < q.confidence) {
    if (++bmds > kMaxBmds) throw InfeasibleError("test budget cannot reach the confidence");
  }
  ElectorateSize out;
  out.bmds = bmds;
  out.voters = bmds * q.bmd_daily_capacity;
  out.tests = bmds * q.tests_per_bmd_per_day;
  if (q.convention == SamplingConvention::kWithoutReplacement) {
    out.flawed = static_cast<std::uint64_t>(
        std::floor(q.altered_fraction * static_cast<double>(out.voters) + 0.5));
  }
  out.achieved_detection = budgeted_detection(q, bmds);
  out.detection_with_one_fewer_bmd = bmds > 1 ? budgeted_detection(q, bmds - 1) : 0.0;
  out.convention = q.convention;
  return out;
}

double margin_leverage(double altered_ballot_fraction, double contest_ballot_share,
                       double undervote_rate) {
  if (!(contest_ballot_share > 0.0 && contest_ballot_share <= 1.0)) {
    throw DomainError("contest ballot share must lie in (0, 1]");
  }
  if (!(undervote_rate >= 0.0 && undervote_rate < 1.0)) {
    throw DomainError("undervote rate must lie in [0, 1)");
  }
  require_probability(altered_ballot_fraction, "altered ballot fraction");
  return 2.0 * altered_ballot_fraction / (contest_ballot_share * (1.0 - undervote_rate));
}

double epsilon_budget(double alpha, double beta, double r, std::uint64_t tests) {
  require_open_unit(alpha, "alpha");
  require_open_unit(r, "r");
  if (!(beta >= 0.0)) throw DomainError("beta must be non-negative");
  if (beta >= alpha) throw InfeasibleError("there is no such test count unless beta < alpha");
  if (tests == 0) throw DomainError("test budget must be positive");
  // (alpha-beta)^(1/T) - 1 without cancellation.
  return 2.0 * (std::expm1(std::log(alpha - beta) / static_cast<double>(tests)) + r);
}

std::uint64_t min_tests_with_estimation_error(double r, double epsilon, double alpha,
                                              double beta) {
  require_open_unit(r, "r");
  require_open_unit(alpha, "alpha");
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
  if (!(beta >= 0.0)) throw DomainError("beta must be non-negative");
  if (beta >= alpha) throw InfeasibleError("there is no such test count unless beta < alpha");
  if (epsilon >= 2.0 * r) {
    throw InfeasibleError("estimation error >= 2r: a set of mass r can be invisible to every test");
  }
  const double log_base = std::log1p(epsilon / 2.0 - r);
  const double log_target = std::log(alpha - beta);
  auto t = static_cast<std::uint64_t>(std::max(1.0, std::ceil(log_target / log_base)));
  while (t > 1 && static_cast<double>(t - 1) * log_base <= log_target) --t;
  while (static_cast<double>(t) * log_base > log_target) ++t;
  return t;
}

std::vector<CampaignCost> tester_time(const std::vector<TestCampaign>& campaigns) {
  std::vector<CampaignCost> out;
  double total = 0.0;
  for (const auto& c : campaigns) {
    if (!(c.minutes_per_test >= 0.0)) throw DomainError("minutes per test must be non-negative");
    const double minutes =
        static_cast<double>(c.tests) * c.minutes_per_test * static_cast<double>(c.vote_variants);
    total += minutes;
    out.push_back({c.label, minutes, total});
  }
  return out;
}

std::string hours_minutes(double minutes) {
  const auto m = static_cast<long long>(std::llround(minutes));
  return std::to_string(m / 60) + "h" + (m % 60 < 10 ? "0" : "") + std::to_string(m % 60) + "m";
}

}  // namespace bmdlimits::parallel
