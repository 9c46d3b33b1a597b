#pragma once

// Lower bounds on the training sample a tester needs to estimate the
// distribution of voting transactions well enough for randomized parallel
// tests to be meaningful. Combines the minimax L1 lower bound for discrete
// distribution estimation with a one-sided Chebyshev (Cantelli) conversion
// from expected to high-probability error.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bmdlimits::minimax {

// Minimax lower bound on E||P_hat - P||_1 over distributions on S points
// from n samples, for a free parameter zeta in (0, 1]:
//   (1/8) sqrt(e S / ((1+zeta) n))    if (1+zeta) n / S >  e/16
//   exp(-2 (1+zeta) n / S)             if (1+zeta) n / S <= e/16
//   - exp(-zeta^2 n / 24) - 12 exp(-zeta^2 S / (32 (ln S)^2)).
// May be negative (vacuous).
double hjw_lower_bound(double n, double support, double zeta);

// sqrt(beta / (1 - beta)).
double cantelli_lambda(double beta);

struct FixedZeta {
  double value = 1.0;
};
// Maximize over `points` log-spaced values in [lo, 1].
struct ZetaGrid {
  std::size_t points = 1000;
  double lo = 0.01;
};
using ZetaStrategy = std::variant<FixedZeta, ZetaGrid>;

std::vector<double> zeta_grid_values(const ZetaGrid& grid);

// How the estimation-failure budget beta is split off alpha when the test
// budget is finite.
//   kMaximizeThreshold: the beta in (0, alpha) giving the largest threshold
//                       (smallest sample-size bound); default.
//   kHalfAlpha:         beta = alpha / 2.
enum class BetaPolicy { kMaximizeThreshold, kHalfAlpha };

struct MinimaxQuery {
  double r = 0.005;          // altered-transaction fraction
  double alpha = 0.01;       // 1 - confidence
  std::optional<std::uint64_t> tests;  // nullopt: unlimited
  double support = 6.14e6;   // S
  std::optional<double> beta;          // overrides beta_policy when set
  BetaPolicy beta_policy = BetaPolicy::kMaximizeThreshold;
  ZetaStrategy zeta = FixedZeta{1.0};
};

void validate(const MinimaxQuery& q);

struct Threshold {
  double value = 0.0;
  std::optional<double> beta;  // finite test budget only
  std::string formula;
};

// The largest expected L1 error compatible with detection:
//   unlimited tests: 2r + cantelli_lambda(alpha)
//   T tests:         epsilon_budget(alpha, beta, r, T) + cantelli_lambda(beta)
Threshold detection_threshold(const MinimaxQuery& q);

// Bound under the query's zeta strategy, and the zeta attaining it.
struct ResolvedBound {
  double value = 0.0;
  double zeta = 1.0;
};
ResolvedBound resolved_bound(const MinimaxQuery& q, std::uint64_t n);

struct BoundReport {
  std::uint64_t min_training_n = 0;
  double zeta_used = 1.0;
  double threshold = 0.0;
  std::optional<double> beta_used;
  double bound_at_n = 0.0;
  double bound_at_previous = 0.0;
  // The bound never exceeds the threshold: it rules out no sample size.
  bool vacuous = false;
  std::string formula;
};

// Smallest n past which the lower bound no longer exceeds the threshold:
// bound(n) <= threshold < bound(n-1). Throws InfeasibleError when the
// threshold is not positive.
BoundReport min_training_sample(const MinimaxQuery& q);

}  // namespace bmdlimits::minimax
