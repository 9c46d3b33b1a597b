#pragma once

// Passive testing: raise an alarm when the count of spoiled ballots in a
// contest reaches a threshold. Spoiled-ballot counts are Poisson with mean
// N*base_rate when the machines behave, and N*(base_rate + margin/2 *
// detect_rate) when an attacker has flipped enough votes to overturn the
// margin and a `detect_rate` share of the affected voters notice.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bmdlimits::passive {

// How the count that sits exactly on the alarm threshold k is charged.
//   kStrict:           alarm iff count >= k; fp = P(B >= k), fn = P(A < k).
//   kBoundaryExcluded: k is the benign (1 - fp_budget) quantile and the
//                      count k is charged to neither error;
//                      fp = P(B > k), fn = P(A < k).
// kBoundaryExcluded is the convention behind the published passive-testing
// tables and is the default.
enum class ThresholdConvention { kBoundaryExcluded, kStrict };

std::string to_string(ThresholdConvention c);

struct PassiveDesign {
  double margin = 0.0;       // fraction of valid votes
  double detect_rate = 0.0;  // share of affected voters who spoil
  double base_rate = 0.0;    // benign per-voter spoil probability
  double fp_budget = 0.05;
  double fn_budget = 0.05;
  ThresholdConvention convention = ThresholdConvention::kBoundaryExcluded;

  // Extra per-voter spoil rate caused by the attack.
  double attack_rate() const noexcept { return margin / 2.0 * detect_rate; }
  double attacked_rate() const noexcept { return base_rate + attack_rate(); }
};

// Throws DomainError unless base_rate, fp_budget and fn_budget lie in (0,1)
// and margin, detect_rate lie in [0,1).
void validate(const PassiveDesign& design);

struct ErrorRates {
  double fp = 0.0;
  double fn = 0.0;
};

// False-positive and false-negative probabilities of alarm threshold k in a
// contest of N voters, under the design's convention.
ErrorRates passive_power(std::uint64_t voters, const PassiveDesign& design, std::uint64_t k);

// Smallest k >= 1 whose false-positive rate meets the budget at N voters.
std::uint64_t alarm_threshold(std::uint64_t voters, const PassiveDesign& design);

// The alarm threshold at N voters if it also meets the fn budget.
std::optional<std::uint64_t> feasible_threshold(std::uint64_t voters, const PassiveDesign& design);

struct PassiveSolution {
  std::uint64_t contest_size = 0;
  std::uint64_t alarm_threshold = 0;
  double achieved_fp = 0.0;
  double achieved_fn = 0.0;
  // feasible_threshold(contest_size - 1) is empty.
  bool minimality_certified = false;
};

// Smallest contest size admitting a threshold that meets both budgets.
// Throws InfeasibleError when margin or detect_rate is zero.
PassiveSolution min_contest_size(const PassiveDesign& design);

struct PassiveCell {
  double margin = 0.0;
  double detect_rate = 0.0;
  double base_rate = 0.0;
  std::optional<PassiveSolution> solution;
  std::string error;  // set when the cell is infeasible
};

// Grid of minimum contest sizes with fp = fn = `budget`. Rows run over
// margins (outer) and detect rates (inner); columns over base rates.
struct PassiveTable {
  double budget = 0.0;
  std::vector<double> margins;
  std::vector<double> detect_rates;
  std::vector<double> base_rates;
  std::vector<PassiveCell> cells;  // row-major: (margin, detect) x base

  const PassiveCell& at(std::size_t margin_i, std::size_t detect_i, std::size_t base_i) const;
};

PassiveTable table_passive(double budget, const std::vector<double>& margins,
                           const std::vector<double>& detect_rates,
                           const std::vector<double>& base_rates,
                           ThresholdConvention convention = ThresholdConvention::kBoundaryExcluded);

}  // namespace bmdlimits::passive
