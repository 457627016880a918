#include "msmpower/weightgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "msmpower/rng.hpp"

namespace msmpower {

namespace {

constexpr double kMinTarget = 1.0 + 1e-6;
constexpr double kMaxTarget = 1000.0;
constexpr double kSolveTol = 1e-10;

double kish_of(const std::vector<double>& w) {
  double sum = 0.0, sum2 = 0.0;
  for (double v : w) {
    sum += v;
    sum2 += v * v;
  }
  return static_cast<double>(w.size()) * sum2 / (sum * sum);
}

}  // namespace

double beta_reciprocal_deff(double shape) {
  if (!(shape > 2.0)) {
    throw DomainError("reciprocal-beta design effect requires shape > 2");
  }
  const double num = 2.0 * (shape - 1.0) * (shape - 1.0);
  return num / ((shape - 2.0) * (2.0 * shape - 1.0));
}

double beta_shape_for_deff(double target_deff) {
  if (!(target_deff > kMinTarget) || !(target_deff <= kMaxTarget)) {
    std::ostringstream msg;
    msg << "target design effect " << target_deff << " outside ("
        << kMinTarget << ", " << kMaxTarget << "]";
    throw UnachievableTargetError(msg.str());
  }
  // deff(shape) decreases from +inf at shape -> 2+ to 1 as shape -> inf;
  // deff - 1 ~ 1/(2 shape), so 1e7 covers targets down to 1 + 1e-6.
  double lo = 2.0 + 1e-9;
  double hi = 1e7;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double value = beta_reciprocal_deff(mid);
    if (std::abs(value - target_deff) < kSolveTol) return mid;
    if (value > target_deff) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

WeightSample sample_weight_distribution(double target_deff, std::size_t n_a,
                                        std::uint64_t seed,
                                        std::optional<double> tolerance,
                                        int max_attempts) {
  if (n_a < 2) throw InvalidInputsError("n_a must be at least 2");
  const double shape = beta_shape_for_deff(target_deff);
  Rng rng(seed, 0);
  std::vector<double> draws(n_a);
  WeightSample best;
  best.shape = shape;
  double best_gap = std::numeric_limits<double>::infinity();
  const int attempts = tolerance.has_value() ? std::max(1, max_attempts) : 1;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    for (auto& v : draws) v = 1.0 / rng.beta(shape, shape);
    const double realized = kish_of(draws);
    const double gap = std::abs(realized - target_deff);
    if (gap < best_gap) {
      best_gap = gap;
      best.realized_deff = realized;
      best.attempts = attempt;
      best.weights.entries.clear();
      best.weights.entries.reserve(n_a);
      for (double v : draws) best.weights.entries.push_back({1, v});
    }
    if (!tolerance.has_value() || gap <= *tolerance) return best;
  }
  std::ostringstream msg;
  msg << "no draw within " << *tolerance << " of " << target_deff << " in "
      << attempts << " attempts (closest " << best.realized_deff << ")";
  throw ResampleBudgetExceeded(msg.str());
}

std::vector<HistogramBin> weight_histogram(const WeightSet& weights,
                                           std::size_t bins) {
  if (weights.entries.empty() || bins == 0) return {};
  std::vector<double> w;
  w.reserve(weights.entries.size());
  for (const auto& entry : weights.entries) w.push_back(entry.w);
  std::sort(w.begin(), w.end());
  const double lo = w.front();
  // Cap the binned range at the 99th percentile; the overflow bin absorbs
  // the heavy right tail of reciprocal-beta draws.
  const auto q_idx = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(w.size()) - 1.0,
                       std::ceil(0.99 * static_cast<double>(w.size())) - 1.0));
  const double hi = std::max(w[q_idx], lo + 1e-12);
  const double width = (hi - lo) / static_cast<double>(bins);

  std::vector<HistogramBin> out(bins + 1);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].left = lo + width * static_cast<double>(b);
  }
  out[bins].left = hi;  // overflow
  for (double v : w) {
    std::size_t b;
    if (v >= hi) {
      b = bins;
    } else {
      b = static_cast<std::size_t>((v - lo) / width);
      if (b >= bins) b = bins - 1;
    }
    ++out[b].count;
  }
  return out;
}

std::string histogram_to_text(const std::vector<HistogramBin>& bins) {
  std::ostringstream out;
  out.precision(10);
  for (const auto& bin : bins) {
    out << bin.left << '\t' << bin.count << '\n';
  }
  return out.str();
}

}  // namespace msmpower
