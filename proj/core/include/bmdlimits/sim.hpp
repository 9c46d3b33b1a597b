#pragma once

// Monte Carlo play of the tampering game: Mallory alters a subset of voting
// transactions, Pat runs test transactions, voters spoil ballots. Every
// replication draws from its own stream keyed by (seed, trial), and results
// are reduced in trial order, so reports do not depend on the worker count.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bmdlimits/transaction_space.hpp"

namespace bmdlimits::sim {

// Per-attribute allowed values; an empty set matches any value.
using AttributeBox = std::vector<std::vector<std::uint64_t>>;

struct MalloryStrategy {
  AttributeBox trigger;  // conjunction over attributes
  double flip_prob = 0.0;
  std::string label;
  // Alter exactly floor(q * triggered) transactions instead of flipping
  // each triggered transaction independently.
  bool exact_count = false;
};

bool matches(const AttributeBox& box, const txn::Transaction& t);

enum class PatMode { kUniform, kDistribution, kScript };

struct PatStrategy {
  PatMode mode = PatMode::kUniform;
  std::uint64_t test_count = 0;  // ignored in script mode
  std::optional<txn::TransactionDistribution> distribution;
  std::vector<txn::Transaction> script;
};

struct PassiveParams {
  double detect_rate = 0.0;
  double base_rate = 0.0;
  std::uint64_t alarm_threshold = 1;  // alarm iff spoils >= threshold
};

struct SimScenario {
  std::string name;
  txn::TransactionDistribution voter_dist;
  std::uint64_t n_voters = 0;
  MalloryStrategy mallory;
  std::optional<PatStrategy> pat;
  std::optional<PassiveParams> passive;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
};

// Throws DomainError on any inconsistency.
void validate(const SimScenario& s);

struct SimOptions {
  unsigned workers = 1;  // 0: hardware concurrency
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

// Proportion estimate from a success count.
Estimate proportion(std::uint64_t successes, std::uint64_t trials);

struct ParallelReport {
  Estimate detection;
  Estimate altered_fraction;   // among the n_voters real voters
  double trigger_mass_pat = 0.0;
  double trigger_mass_voters = 0.0;
  std::optional<double> analytic_detection;
  std::uint64_t tests = 0;
};

struct PassiveReport {
  Estimate fp;
  Estimate fn;
  Estimate altered_fraction;
  double analytic_fp = 0.0;  // Poisson model, alarm iff spoils >= k
  double analytic_fn = 0.0;
  std::uint64_t alarm_threshold = 0;
};

struct SimReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::optional<ParallelReport> parallel;
  std::optional<PassiveReport> passive;
};

SimReport run_parallel_sim(const SimScenario& s, const SimOptions& opt = {});
SimReport run_passive_sim(const SimScenario& s, const SimOptions& opt = {});
// Runs whichever of the two games the scenario configures.
SimReport run_scenario(const SimScenario& s, const SimOptions& opt = {});

struct EstimationReport {
  std::uint64_t n_train = 0;
  std::uint64_t trials = 0;
  double mean_l1 = 0.0;
  double sd_l1 = 0.0;
  double min_l1 = 0.0;
  double max_l1 = 0.0;
  double support = 0.0;               // S used for the bound
  double lower_bound_zeta1 = 0.0;     // worst-case bound, for comparison only
  std::vector<double> per_trial;
};

// Trial t draws n_train points with RngStream(seed, t, kEstimationTag) and
// measures l1_distance(estimate(sample), truth).
inline constexpr std::uint64_t kEstimationTag = 3;
EstimationReport run_estimation_study(const txn::TransactionDistribution& truth,
                                      std::uint64_t n_train, std::uint64_t trials,
                                      std::uint64_t seed, const SimOptions& opt = {});

// Scenario file (JSON):
//   {"name": "...", "seed": 7, "trials": 100000, "n_voters": 50000,
//    "space": <space config, its distribution is the voters'>,
//    "mallory": {"trigger": {"Languages": [0, 2]}, "flip_prob": 0.5,
//                "label": "...", "exact_count": false},
//    "pat": {"mode": "uniform" | "distribution" | "script", "tests": 5,
//            "distribution": <distribution spec>, "script": [[...], ...]},
//    "passive": {"detect_rate": 0.25, "base_rate": 0.005, "alarm_threshold": 270}}
// Any malformed or inconsistent content raises ParseError.
SimScenario parse_scenario(const std::string& json_text, const std::string& source = "<scenario>");
SimScenario load_scenario(const std::filesystem::path& path);

}  // namespace bmdlimits::sim
