#include "bmdlimits/minimax.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bmdlimits/errors.hpp"
#include "bmdlimits/parallel.hpp"

namespace bmdlimits::minimax {
namespace {

constexpr std::uint64_t kMaxTrainingN = std::uint64_t{1} << 62;

// Golden-section search for the maximum of a concave function on [lo, hi].
template <class F>
double argmax_concave(double lo, double hi, F f) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < 200 && b - a > 1e-15 * hi; ++i) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double hjw_lower_bound(double n, double support, double zeta) {
  if (!(zeta > 0.0 && zeta <= 1.0)) throw DomainError("zeta must lie in (0, 1]");
  if (!(n >= 1.0) || !(support >= 1.0)) throw DomainError("n and S must be at least 1");
  const double x = (1.0 + zeta) * n / support;
  const double head = x > std::numbers::e / 16.0
                          ? std::sqrt(std::numbers::e / x) / 8.0
                          : std::exp(-2.0 * x);
  const double log_s = std::log(support);
  return head - std::exp(-zeta * zeta * n / 24.0) -
         12.0 * std::exp(-zeta * zeta * support / (32.0 * log_s * log_s));
}

double cantelli_lambda(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("beta must lie in [0, 1)");
  return std::sqrt(beta / (1.0 - beta));
}

std::vector<double> zeta_grid_values(const ZetaGrid& grid) {
  if (grid.points == 0) throw DomainError("zeta grid needs at least one point");
  if (!(grid.lo > 0.0 && grid.lo <= 1.0)) throw DomainError("zeta grid start must lie in (0, 1]");
  std::vector<double> out(grid.points);
  if (grid.points == 1) {
    out[0] = 1.0;
    return out;
  }
  const double step = -std::log(grid.lo) / static_cast<double>(grid.points - 1);
  for (std::size_t i = 0; i < grid.points; ++i) {
    out[i] = std::exp(std::log(grid.lo) + step * static_cast<double>(i));
  }
  out.back() = 1.0;
  return out;
}

void validate(const MinimaxQuery& q) {
  if (!(q.r > 0.0 && q.r < 1.0)) throw DomainError("r must lie in (0, 1)");
  if (!(q.support >= 2.0)) throw DomainError("support size must be at least 2");
  if (q.tests) {
    if (*q.tests == 0) throw DomainError("test budget must be positive");
    if (!(q.alpha > 0.0 && q.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  } else if (!(q.alpha >= 0.0 && q.alpha < 1.0)) {
    throw DomainError("alpha must lie in [0, 1)");
  }
  if (q.beta && !(*q.beta >= 0.0)) throw DomainError("beta must be non-negative");
  if (const auto* fixed = std::get_if<FixedZeta>(&q.zeta)) {
    if (!(fixed->value > 0.0 && fixed->value <= 1.0)) throw DomainError("zeta must lie in (0, 1]");
  } else {
    (void)zeta_grid_values(std::get<ZetaGrid>(q.zeta));
  }
}

Threshold detection_threshold(const MinimaxQuery& q) {
  validate(q);
  Threshold t;
  if (!q.tests) {
    t.value = 2.0 * q.r + cantelli_lambda(q.alpha);
    t.formula = "2r + sqrt(alpha/(1-alpha))";
    return t;
  }
  const std::uint64_t tests = *q.tests;
  const auto at = [&](double beta) {
    return parallel::epsilon_budget(q.alpha, beta, q.r, tests) + cantelli_lambda(beta);
  };
  double beta = 0.0;
  if (q.beta) {
    beta = *q.beta;
    t.formula = "2((alpha-beta)^(1/T) - 1 + r) + sqrt(beta/(1-beta)), beta given";
  } else if (q.beta_policy == BetaPolicy::kHalfAlpha) {
    beta = q.alpha / 2.0;
    t.formula = "2((alpha-beta)^(1/T) - 1 + r) + sqrt(beta/(1-beta)), beta = alpha/2";
  } else {
    beta = argmax_concave(0.0, q.alpha, [&](double b) {
      return b < q.alpha ? at(b) : -std::numeric_limits<double>::infinity();
    });
    t.formula = "2((alpha-beta)^(1/T) - 1 + r) + sqrt(beta/(1-beta)), beta maximizing";
  }
  t.value = at(beta);
  t.beta = beta;
  return t;
}

ResolvedBound resolved_bound(const MinimaxQuery& q, std::uint64_t n) {
  const double dn = static_cast<double>(n);
  if (const auto* fixed = std::get_if<FixedZeta>(&q.zeta)) {
    return {hjw_lower_bound(dn, q.support, fixed->value), fixed->value};
  }
  ResolvedBound best{-std::numeric_limits<double>::infinity(), 1.0};
  for (double z : zeta_grid_values(std::get<ZetaGrid>(q.zeta))) {
    const double v = hjw_lower_bound(dn, q.support, z);
    if (v > best.value) best = {v, z};
  }
  return best;
}

BoundReport min_training_sample(const MinimaxQuery& q) {
  const Threshold thr = detection_threshold(q);
  if (!(thr.value > 0.0)) {
    throw InfeasibleError("detection threshold is not positive: no training sample suffices");
  }
  BoundReport rep;
  rep.threshold = thr.value;
  rep.beta_used = thr.beta;
  rep.formula = thr.formula;

  const auto exceeds = [&](std::uint64_t n) { return resolved_bound(q, n).value > thr.value; };

  // For tiny n the penalty terms swamp the bound, so it rises before it
  // falls. Walk up by doubling to a point above the threshold, keep doubling
  // until it drops below, then bisect the falling stretch.
  std::uint64_t above = 1;
  while (!exceeds(above)) {
    if (above >= kMaxTrainingN) {
      rep.min_training_n = 1;
      rep.vacuous = true;
      const ResolvedBound b = resolved_bound(q, 1);
      rep.bound_at_n = b.value;
      rep.zeta_used = b.zeta;
      rep.bound_at_previous = std::numeric_limits<double>::quiet_NaN();
      return rep;
    }
    above *= 2;
  }
  std::uint64_t below = above * 2;
  while (exceeds(below)) {
    if (below >= kMaxTrainingN) throw InfeasibleError("lower bound exceeds the threshold everywhere");
    above = below;
    below *= 2;
  }
  while (below - above > 1) {
    const std::uint64_t mid = above + (below - above) / 2;
    (exceeds(mid) ? above : below) = mid;
  }
  const ResolvedBound at_n = resolved_bound(q, below);
  rep.min_training_n = below;
  rep.bound_at_n = at_n.value;
  rep.zeta_used = at_n.zeta;
  rep.bound_at_previous = resolved_bound(q, below - 1).value;
  return rep;
}

}  // namespace bmdlimits::minimax
