#pragma once

// Exact probability kernels evaluated in log space. Every routine here is a
// pure function and may be called concurrently.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>

namespace bmdlimits::stats {

// Natural log of a probability (or of a product of probabilities).
struct LogProb {
  double value = 0.0;

  double prob() const noexcept { return std::exp(value); }
  friend bool operator==(const LogProb&, const LogProb&) = default;
};

// Poisson law with a known mean. mean == 0 is the point mass at zero.
struct PoissonModel {
  double mean = 0.0;
};

// P{X >= k} for X ~ Poisson(mean). Absolute error below 1e-12.
// Throws DomainError for a negative or non-finite mean.
double poisson_sf(PoissonModel model, std::uint64_t k);

// P{X <= k}; k < 0 gives 0.
double poisson_cdf(PoissonModel model, std::int64_t k);

// Smallest k with poisson_sf(model, k) <= alpha. Requires 0 < alpha < 1.
std::uint64_t poisson_upper_quantile(PoissonModel model, double alpha);

// The Poisson mean at which P{X <= k} equals `target` (0 < target < 1).
// P{X <= k} is strictly decreasing in the mean, so the root is unique.
double poisson_mean_for_cdf(std::uint64_t k, double target);

// Log of the probability that a simple random sample of `draws` units taken
// without replacement from `population` units contains none of `flawed`:
//   sum_{i<draws} log((population - flawed - i) / (population - i)).
// Returns -inf once draws exceeds population - flawed.
LogProb log_no_replacement_miss(std::uint64_t population, std::uint64_t flawed,
                                std::uint64_t draws);
double no_replacement_miss_prob(std::uint64_t population, std::uint64_t flawed,
                                std::uint64_t draws);

// P{X >= k} for X ~ Binomial(trials, p). Absolute error below 1e-12.
double binomial_sf(std::uint64_t trials, double p, std::uint64_t k);

// Smallest integer in [lo, hi] for which `pred` holds, assuming pred is
// monotone (false...false true...true) on that range; nullopt if pred(hi)
// is false.
template <std::integral T, class Pred>
std::optional<T> first_true(T lo, T hi, Pred pred) {
  if (lo > hi || !pred(hi)) return std::nullopt;
  while (lo < hi) {
    const T mid = lo + (hi - lo) / 2;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

// Doubles `hi` from `start` until pred(hi) holds or `limit` is passed, then
// bisects. Same monotonicity assumption as first_true.
template <std::integral T, class Pred>
std::optional<T> first_true_unbounded(T start, T limit, Pred pred) {
  T lo = start;
  T hi = start;
  while (!pred(hi)) {
    if (hi >= limit) return std::nullopt;
    lo = hi + 1;
    hi = (hi > limit / 2) ? limit : std::max<T>(hi * 2, hi + 1);
  }
  return first_true(lo, hi, pred);
}

}  // namespace bmdlimits::stats
