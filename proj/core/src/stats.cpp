#include "bmdlimits/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bmdlimits/errors.hpp"

namespace bmdlimits::stats {
namespace {

constexpr double kLn2Pi = 1.837877066409345483560659472811;  // log(2*pi)
constexpr double kTailStop = 1e-17;

// Error of Stirling's approximation: log(n!) - log(sqrt(2 pi n) (n/e)^n).
double stirling_error(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * kLn2Pi;
  }
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x/np) + np - x, evaluated without cancellation when
// x is close to np.
double deviance(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    const double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

double poisson_pmf(double x, double mean) {
  if (mean == 0.0) return x == 0.0 ? 1.0 : 0.0;
  if (x == 0.0) return std::exp(-mean);
  return std::exp(-stirling_error(x) - deviance(x, mean)) / std::sqrt(2.0 * std::numbers::pi * x);
}

double binomial_pmf(double x, double n, double p) {
  const double q = 1.0 - p;
  if (x == 0.0) return std::exp(n * std::log1p(-p));
  if (x == n) return std::exp(n * std::log(p));
  const double lc = stirling_error(n) - stirling_error(x) - stirling_error(n - x) -
                    deviance(x, n * p) - deviance(n - x, n * q);
  const double lf = kLn2Pi + std::log(x) + std::log1p(-x / n);
  return std::exp(lc - 0.5 * lf);
}

void check_mean(PoissonModel model) {
  if (!(model.mean >= 0.0) || !std::isfinite(model.mean)) {
    throw DomainError("Poisson mean must be finite and non-negative, got " +
                      std::to_string(model.mean));
  }
}

// P{X <= k} summed downward from k; only called with k < mean.
double poisson_lower_tail(double mean, std::uint64_t k) {
  double term = poisson_pmf(static_cast<double>(k), mean);
  double sum = term;
  for (std::uint64_t j = k; j > 0; --j) {
    term *= static_cast<double>(j) / mean;
    sum += term;
    if (term < kTailStop * sum) break;
  }
  return sum;
}

// P{X >= k} summed upward from k; only called with k >= mean.
double poisson_upper_tail(double mean, std::uint64_t k) {
  double term = poisson_pmf(static_cast<double>(k), mean);
  double sum = term;
  for (std::uint64_t j = k;; ++j) {
    term *= mean / static_cast<double>(j + 1);
    sum += term;
    if (term < kTailStop * sum || term == 0.0) break;
  }
  return sum;
}

}  // namespace

double poisson_sf(PoissonModel model, std::uint64_t k) {
  check_mean(model);
  if (k == 0) return 1.0;
  if (model.mean == 0.0) return 0.0;
  if (static_cast<double>(k - 1) < model.mean) {
    return std::clamp(1.0 - poisson_lower_tail(model.mean, k - 1), 0.0, 1.0);
  }
  return std::clamp(poisson_upper_tail(model.mean, k), 0.0, 1.0);
}

double poisson_cdf(PoissonModel model, std::int64_t k) {
  check_mean(model);
  if (k < 0) return 0.0;
  const auto uk = static_cast<std::uint64_t>(k);
  if (model.mean == 0.0) return 1.0;
  if (static_cast<double>(uk) < model.mean) {
    return std::clamp(poisson_lower_tail(model.mean, uk), 0.0, 1.0);
  }
  return std::clamp(1.0 - poisson_upper_tail(model.mean, uk + 1), 0.0, 1.0);
}

std::uint64_t poisson_upper_quantile(PoissonModel model, double alpha) {
  check_mean(model);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (model.mean == 0.0) return 1;
  // Start the bracket just below the mean; sf there is at least ~1/2 > alpha
  // only when alpha < 1/2, so fall back to 0 otherwise.
  const auto near_mean = static_cast<std::uint64_t>(std::floor(model.mean));
  std::uint64_t start = 0;
  if (alpha < 0.5 && near_mean > 0 && poisson_sf(model, near_mean) > alpha) start = near_mean;
  auto k = first_true_unbounded<std::uint64_t>(
      start, std::numeric_limits<std::uint64_t>::max() / 4,
      [&](std::uint64_t c) { return poisson_sf(model, c) <= alpha; });
  return *k;
}

double poisson_mean_for_cdf(std::uint64_t k, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw DomainError("cdf target must lie in (0, 1), got " + std::to_string(target));
  }
  const auto ik = static_cast<std::int64_t>(k);
  double lo = 0.0;
  double hi = static_cast<double>(k) + 1.0;
  while (poisson_cdf({hi}, ik) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (poisson_cdf({mid}, ik) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

LogProb log_no_replacement_miss(std::uint64_t population, std::uint64_t flawed,
                                std::uint64_t draws) {
  if (flawed > population) {
    throw DomainError("flawed count " + std::to_string(flawed) + " exceeds population " +
                      std::to_string(population));
  }
  if (flawed == 0) return {0.0};
  if (draws > population - flawed) return {-std::numeric_limits<double>::infinity()};
  const double f = static_cast<double>(flawed);
  double acc = 0.0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    acc += std::log1p(-f / static_cast<double>(population - i));
  }
  return {acc};
}

double no_replacement_miss_prob(std::uint64_t population, std::uint64_t flawed,
                                std::uint64_t draws) {
  return std::clamp(log_no_replacement_miss(population, flawed, draws).prob(), 0.0, 1.0);
}

double binomial_sf(std::uint64_t trials, double p, std::uint64_t k) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("binomial p must lie in [0, 1], got " + std::to_string(p));
  }
  if (k == 0) return 1.0;
  if (k > trials) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double n = static_cast<double>(trials);
  const double ratio = p / (1.0 - p);
  if (static_cast<double>(k - 1) < n * p) {
    // 1 - P{X <= k-1}, summing downward.
    double term = binomial_pmf(static_cast<double>(k - 1), n, p);
    double sum = term;
    for (std::uint64_t j = k - 1; j > 0; --j) {
      term *= static_cast<double>(j) / (static_cast<double>(trials - j + 1) * ratio);
      sum += term;
      if (term < kTailStop * sum) break;
    }
    return std::clamp(1.0 - sum, 0.0, 1.0);
  }
  double term = binomial_pmf(static_cast<double>(k), n, p);
  double sum = term;
  for (std::uint64_t j = k; j < trials; ++j) {
    term *= static_cast<double>(trials - j) / static_cast<double>(j + 1) * ratio;
    sum += term;
    if (term < kTailStop * sum || term == 0.0) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace bmdlimits::stats
