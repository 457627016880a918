#pragma once

#include <cstdint>
#include <random>
#include <vector>

// Deterministic, replication-indexed random streams. A stream is fully
// determined by (seed, stream index), so simulation results are
// bit-reproducible for a given seed regardless of execution order or thread
// count. Distribution draws are implemented here rather than with
// std::*_distribution so sequences do not depend on the standard library.

namespace msmpower {

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform();

  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via the inverse CDF.
  double normal();

  // Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang squeeze).
  double gamma(double shape);

  // Beta(a, b) for a, b >= 1 via the gamma ratio.
  double beta(double a, double b);

 private:
  std::mt19937_64 engine_;
};

// Stream index reserved for superpopulation generation; replication streams
// use indices 0..R-1.
inline constexpr std::uint64_t kSuperpopulationStream = 1ull << 62;

// n distinct indices from [0, population), uniformly, in deterministic order
// (Floyd's algorithm followed by a sort).
std::vector<std::uint32_t> sample_without_replacement(std::uint32_t population,
                                                      std::uint32_t n,
                                                      Rng& rng);

}  // namespace msmpower
