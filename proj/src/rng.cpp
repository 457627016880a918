#include "msmpower/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_set>

#include "msmpower/design.hpp"
#include "msmpower/errors.hpp"

namespace msmpower {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  // Mix (seed, stream) into eight 32-bit words; mt19937_64 seeded through
  // seed_seq is fully specified by the standard, so streams are reproducible
  // across platforms.
  std::uint64_t state = seed;
  (void)splitmix64(state);
  state ^= 0x9E3779B97F4A7C15ull * (stream + 1);
  std::array<std::uint32_t, 8> words{};
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t w = splitmix64(state);
    words[2 * i] = static_cast<std::uint32_t>(w);
    words[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

double Rng::uniform() {
  // 53 random bits, offset half a step: strictly inside (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::normal() { return normal_quantile(uniform()); }

double Rng::gamma(double shape) {
  if (!(shape >= 1.0)) {
    throw InvalidInputsError("gamma sampler requires shape >= 1");
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::beta(double a, double b) {
  const double g1 = gamma(a);
  const double g2 = gamma(b);
  return g1 / (g1 + g2);
}

std::vector<std::uint32_t> sample_without_replacement(std::uint32_t population,
                                                      std::uint32_t n,
                                                      Rng& rng) {
  if (n > population) {
    throw InvalidInputsError("sample size exceeds population size");
  }
  // Floyd's algorithm: O(n) draws, each index equally likely.
  std::unordered_set<std::uint32_t> seen;
  seen.reserve(n * 2);
  std::vector<std::uint32_t> out;
  out.reserve(n);
  for (std::uint32_t j = population - n; j < population; ++j) {
    const auto t = static_cast<std::uint32_t>(rng.below(j + 1));
    if (seen.insert(t).second) {
      out.push_back(t);
    } else {
      seen.insert(j);
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace msmpower
