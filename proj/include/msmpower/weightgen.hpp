#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msmpower/types.hpp"

// Illustrative weight distributions with a chosen design effect: reciprocals
// of Beta(shape, shape) draws, the shape solved so the population design
// effect E(W^2)/E(W)^2 hits the target.

namespace msmpower {

// Population design effect of W = 1/X, X ~ Beta(shape, shape):
// 2(shape-1)^2 / {(shape-2)(2 shape - 1)}, decreasing from +inf to 1 on
// shape > 2.
double beta_reciprocal_deff(double shape);

// Solves beta_reciprocal_deff(shape) = target by bisection to 1e-10.
// Targets must lie in (1 + 1e-6, 1000].
double beta_shape_for_deff(double target_deff);

struct WeightSample {
  WeightSet weights;        // all entries a = 1 (a single treatment group)
  double shape = 0.0;
  double realized_deff = 1.0;  // Kish deff of the drawn weights
  int attempts = 1;
};

// Draws n_a reciprocal-beta weights. When a tolerance is given, redraws up
// to max_attempts times until the realized Kish deff is within tolerance of
// the target.
WeightSample sample_weight_distribution(double target_deff, std::size_t n_a,
                                        std::uint64_t seed,
                                        std::optional<double> tolerance = {},
                                        int max_attempts = 50);

struct HistogramBin {
  double left = 0.0;
  std::size_t count = 0;
};

// 50 equal-width bins over [min, 99th percentile] plus an overflow bin for
// the heavy right tail.
std::vector<HistogramBin> weight_histogram(const WeightSet& weights,
                                           std::size_t bins = 50);

// Two-column delimited text (bin_left, count).
std::string histogram_to_text(const std::vector<HistogramBin>& bins);

}  // namespace msmpower
