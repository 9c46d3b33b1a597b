#pragma once

#include <cstdint>
#include <random>

namespace bmdlimits {

// A random stream for one replication. Streams are derived from
// (seed, trial, tag) through std::seed_seq, so the same triple always yields
// the same sequence regardless of which worker runs the replication.
// Variates are produced by hand from raw 64-bit draws; the standard
// distributions are implementation-defined and would break cross-platform
// reproducibility.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  bool bernoulli(double p) { return uniform01() < p; }

  // Exact Binomial(n, p) variate by inversion; large n*p is split into
  // chunks so the starting mass never underflows.
  std::uint64_t binomial(std::uint64_t n, double p);

 private:
  std::uint64_t binomial_chunk(std::uint64_t n, double p);

  std::mt19937_64 engine_;
};

}  // namespace bmdlimits
