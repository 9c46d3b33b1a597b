#pragma once

// Closed-form detection probabilities for logic-and-accuracy and parallel
// testing, the "oracle" bound for a tester who can check any cast printout,
// and the margin arithmetic linking altered ballots to outcome changes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bmdlimits::parallel {

// 1 - (1-p)^n: chance that at least one of n independent tests lands on a
// transaction the attacker alters with probability p.
double detection_prob_iid(double p, std::uint64_t n);

// Smallest t with detection_prob_iid(p, t) >= confidence.
// Throws InfeasibleError for p == 0, DomainError outside the open intervals.
std::uint64_t min_tests_iid(double p, double confidence);

struct OracleBoundQuery {
  std::uint64_t population = 0;  // cast printouts V
  std::uint64_t flawed = 0;      // printouts with errors F
  double confidence = 0.95;
};

struct OracleBound {
  std::uint64_t samples = 0;
  double miss_at_samples = 0.0;   // no_replacement_miss_prob at n
  double miss_at_previous = 1.0;  // ... at n-1; exceeds 1 - confidence
};

// Smallest n such that a random sample of n printouts, drawn without
// replacement, misses every flawed one with probability <= 1 - confidence.
OracleBound oracle_min_samples(const OracleBoundQuery& q);

// How test transactions relate to altered voter transactions when sizing an
// electorate under a per-machine test budget.
//   kWithReplacement:    each test independently hits an altered transaction
//                        with probability r; detection = 1 - (1-r)^tests.
//   kWithoutReplacement: F = round-half-up(r * voters) altered transactions;
//                        tests are a simple random sample of the voters'
//                        transactions.
enum class SamplingConvention { kWithReplacement, kWithoutReplacement };

std::string to_string(SamplingConvention c);

struct BudgetedTestQuery {
  std::uint64_t tests_per_bmd_per_day = 13;
  std::uint64_t bmd_daily_capacity = 140;
  double altered_fraction = 0.005;
  double confidence = 0.95;
  SamplingConvention convention = SamplingConvention::kWithReplacement;
};

struct ElectorateSize {
  std::uint64_t voters = 0;
  std::uint64_t bmds = 0;
  std::uint64_t tests = 0;
  std::uint64_t flawed = 0;  // altered transactions (without-replacement only)
  double achieved_detection = 0.0;
  double detection_with_one_fewer_bmd = 0.0;
  SamplingConvention convention = SamplingConvention::kWithReplacement;
};

// Detection probability with `bmds` machines under the query's convention.
double budgeted_detection(const BudgetedTestQuery& q, std::uint64_t bmds);

// Fewest machines (voters = machines * capacity) for which the test budget
// reaches the confidence.
ElectorateSize min_electorate_for_budget(const BudgetedTestQuery& q);

// Largest shift of the ordinary margin obtainable by altering a fraction
// `altered_ballot_fraction` of all ballots in the jurisdiction:
//   2x / (share * (1 - undervote_rate)).
double margin_leverage(double altered_ballot_fraction, double contest_ballot_share,
                       double undervote_rate);

// Largest L1 estimation error that still lets T tests detect an altered
// fraction r with probability 1 - alpha, given estimation failure
// probability beta: 2((alpha - beta)^(1/T) + r - 1). Negative values mean
// no accuracy is enough.
double epsilon_budget(double alpha, double beta, double r, std::uint64_t tests);

// Smallest t with (1 + epsilon/2 - r)^t <= alpha - beta.
std::uint64_t min_tests_with_estimation_error(double r, double epsilon, double alpha, double beta);

// Tester time for a set of scripted test campaigns. Durations are inputs.
struct TestCampaign {
  std::string label;
  std::uint64_t tests = 0;
  double minutes_per_test = 0.0;
  std::uint64_t vote_variants = 1;  // repeated once per candidate/undervote
};

struct CampaignCost {
  std::string label;
  double minutes = 0.0;
  double cumulative_minutes = 0.0;
};

std::vector<CampaignCost> tester_time(const std::vector<TestCampaign>& campaigns);

// "4h10m" style rendering of a minute count (rounded to whole minutes).
std::string hours_minutes(double minutes);

}  // namespace bmdlimits::parallel
