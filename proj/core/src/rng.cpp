#include "bmdlimits/rng.hpp"

#include <algorithm>
#include <cmath>

namespace bmdlimits {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return std::mt19937_64(seq);
}

// Keeps (1-p)^n comfortably above the double underflow threshold.
constexpr double kChunkMean = 400.0;

__extension__ using u128 = unsigned __int128;

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag)
    : engine_(make_engine(seed, trial, tag)) {}

std::uint64_t RngStream::uniform_index(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  u128 m = static_cast<u128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t RngStream::binomial(std::uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - binomial(n, 1.0 - p);
  const auto chunk = static_cast<std::uint64_t>(std::max(1.0, std::floor(kChunkMean / p)));
  std::uint64_t total = 0;
  while (n > 0) {
    const std::uint64_t m = n < chunk ? n : chunk;
    total += binomial_chunk(m, p);
    n -= m;
  }
  return total;
}

std::uint64_t RngStream::binomial_chunk(std::uint64_t n, double p) {
  const double q = 1.0 - p;
  const double ratio = p / q;
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
  double u = uniform01();
  std::uint64_t k = 0;
  while (u >= pmf && k < n) {
    u -= pmf;
    pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio;
    ++k;
  }
  return k;
}

}  // namespace bmdlimits
