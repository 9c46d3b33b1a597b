#include "bmdlimits/passive.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "bmdlimits/errors.hpp"
#include "bmdlimits/stats.hpp"

namespace bmdlimits::passive {
namespace {

using stats::PoissonModel;

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

// Index j such that the fp constraint reads P{B <= j} >= 1 - fp_budget.
std::int64_t fp_cdf_index(const PassiveDesign& d, std::uint64_t k) {
  const auto ik = static_cast<std::int64_t>(k);
  return d.convention == ThresholdConvention::kStrict ? ik - 1 : ik;
}

// For threshold k, the voters interval [lo, hi] on which both constraints
// hold, from the Poisson means at which each constraint binds:
//   fp: N*base     <= lambda where P{Pois(lambda) <= fp_index} = 1 - fp_budget
//   fn: N*attacked >= mu     where P{Pois(mu) <= k-1}          = fn_budget
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

Interval voters_interval(const PassiveDesign& d, std::uint64_t k) {
  const auto fp_index = static_cast<std::uint64_t>(fp_cdf_index(d, k));
  const double lambda = stats::poisson_mean_for_cdf(fp_index, 1.0 - d.fp_budget);
  const double mu = stats::poisson_mean_for_cdf(k - 1, d.fn_budget);
  return {mu / d.attacked_rate(), lambda / d.base_rate};
}

}  // namespace

std::string to_string(ThresholdConvention c) {
  return c == ThresholdConvention::kStrict ? "strict" : "boundary-excluded";
}

void validate(const PassiveDesign& d) {
  if (!in_open_unit(d.base_rate)) throw DomainError("base rate must lie in (0, 1)");
  if (!in_open_unit(d.fp_budget)) throw DomainError("false-positive budget must lie in (0, 1)");
  if (!in_open_unit(d.fn_budget)) throw DomainError("false-negative budget must lie in (0, 1)");
  if (!(d.margin >= 0.0 && d.margin < 1.0)) throw DomainError("margin must lie in [0, 1)");
  if (!(d.detect_rate >= 0.0 && d.detect_rate < 1.0)) {
    throw DomainError("detection rate must lie in [0, 1)");
  }
}

ErrorRates passive_power(std::uint64_t voters, const PassiveDesign& d, std::uint64_t k) {
  validate(d);
  if (k == 0) throw DomainError("alarm threshold must be at least 1");
  const double n = static_cast<double>(voters);
  const PoissonModel benign{n * d.base_rate};
  const PoissonModel attacked{n * d.attacked_rate()};
  ErrorRates out;
  out.fp = 1.0 - stats::poisson_cdf(benign, fp_cdf_index(d, k));
  out.fn = stats::poisson_cdf(attacked, static_cast<std::int64_t>(k) - 1);
  return out;
}

std::uint64_t alarm_threshold(std::uint64_t voters, const PassiveDesign& d) {
  validate(d);
  const PoissonModel benign{static_cast<double>(voters) * d.base_rate};
  const std::uint64_t strict_k = stats::poisson_upper_quantile(benign, d.fp_budget);
  const std::uint64_t k =
      d.convention == ThresholdConvention::kStrict ? strict_k : strict_k - 1;
  return std::max<std::uint64_t>(k, 1);
}

std::optional<std::uint64_t> feasible_threshold(std::uint64_t voters, const PassiveDesign& d) {
  if (voters == 0) return std::nullopt;
  const std::uint64_t k = alarm_threshold(voters, d);
  // fn grows with k, so the smallest admissible k is the only one to check.
  if (passive_power(voters, d, k).fn <= d.fn_budget) return k;
  return std::nullopt;
}

PassiveSolution min_contest_size(const PassiveDesign& d) {
  validate(d);
  if (d.margin == 0.0 || d.detect_rate == 0.0) {
    throw InfeasibleError("attack is statistically invisible: margin/2 * detection rate is zero");
  }

  // Both ends of voters_interval(k) grow with k and the ratio hi/lo rises
  // towards attacked/base, so the thresholds with a non-empty continuous
  // interval form a tail [k0, inf). The first k whose interval holds an
  // integer gives the smallest N, since later intervals start further right.
  const auto nonempty = [&](std::uint64_t k) {
    const Interval iv = voters_interval(d, k);
    return iv.lo <= iv.hi;
  };
  const auto k0 = stats::first_true_unbounded<std::uint64_t>(1, std::uint64_t{1} << 40, nonempty);
  if (!k0) throw InfeasibleError("no alarm threshold separates benign and attacked spoil counts");

  std::uint64_t candidate = 0;
  for (std::uint64_t k = *k0;; ++k) {
    const Interval iv = voters_interval(d, k);
    const double lo = std::ceil(iv.lo);
    if (lo <= std::floor(iv.hi)) {
      candidate = static_cast<std::uint64_t>(std::max(lo, 1.0));
      break;
    }
  }

  // The interval ends come from root finding; settle the exact integer by
  // direct evaluation.
  while (candidate > 1 && feasible_threshold(candidate - 1, d)) --candidate;
  while (!feasible_threshold(candidate, d)) ++candidate;

  PassiveSolution sol;
  sol.contest_size = candidate;
  sol.alarm_threshold = *feasible_threshold(candidate, d);
  const ErrorRates e = passive_power(candidate, d, sol.alarm_threshold);
  sol.achieved_fp = e.fp;
  sol.achieved_fn = e.fn;
  sol.minimality_certified = candidate == 1 || !feasible_threshold(candidate - 1, d);
  return sol;
}

const PassiveCell& PassiveTable::at(std::size_t margin_i, std::size_t detect_i,
                                    std::size_t base_i) const {
  const std::size_t row = margin_i * detect_rates.size() + detect_i;
  return cells.at(row * base_rates.size() + base_i);
}

PassiveTable table_passive(double budget, const std::vector<double>& margins,
                           const std::vector<double>& detect_rates,
                           const std::vector<double>& base_rates,
                           ThresholdConvention convention) {
  if (margins.empty() || detect_rates.empty() || base_rates.empty()) {
    throw DomainError("passive table grids must be non-empty");
  }
  PassiveTable table{budget, margins, detect_rates, base_rates, {}};
  for (double m : margins) {
    for (double det : detect_rates) {
      for (double b : base_rates) {
        validate(PassiveDesign{m, det, b, budget, budget, convention});
        table.cells.push_back({m, det, b, std::nullopt, {}});
      }
    }
  }

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < table.cells.size(); i = next++) {
      auto& cell = table.cells[i];
      const PassiveDesign design{cell.margin, cell.detect_rate, cell.base_rate, budget, budget,
                                 convention};
      try {
        cell.solution = min_contest_size(design);
      } catch (const InfeasibleError& e) {
        cell.error = e.what();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                           static_cast<unsigned>(table.cells.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  return table;
}

}  // namespace bmdlimits::passive
