#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msmpower/estimation.hpp"
#include "msmpower/rng.hpp"
#include "msmpower/types.hpp"

// Monte Carlo harness for empirical power: generative scenarios draw
// repeated samples without replacement from one superpopulation; resampling
// designs rebuild a synthetic population from a pilot dataset and draw
// samples with replacement.

namespace msmpower {

struct SimulationConfig {
  long n = 0;                               // analysis sample size
  long replications = 2000;
  std::uint64_t seed = 0;
  long superpopulation_size = 1'000'000;    // generative scenarios only
  double alpha = 0.05;
  int threads = 0;  // 0 = MSMPOWER_THREADS env var or hardware concurrency
};

// Superpopulation of (L, A, Y0, Y1); the observed Y is A Y1 + (1-A) Y0.
struct Superpopulation {
  std::vector<std::uint8_t> cell;
  std::vector<std::uint8_t> a;
  std::vector<double> y0;
  std::vector<double> y1;

  std::size_t size() const { return cell.size(); }
  double y(std::size_t i) const { return a[i] ? y1[i] : y0[i]; }
};

Superpopulation generate_superpopulation(const ScenarioSpec& spec, long size,
                                         std::uint64_t seed);

// Dataset-resampling design: per-row propensities from a fitted logistic
// model, per-arm outcome regressions, and a shift of the arm-0 predictions
// so the synthetic population's effect equals target_ace.
struct ResampleSpec {
  std::string name;
  PilotDataset base_data;       // must carry outcomes and both arms
  ModelTerms propensity_terms;
  ModelTerms outcome_terms;
  double target_ace = 0.0;
};

// Per replication: sample n without replacement, fit the propensity model on
// the sample, fit the MSM with the stacked sandwich (estimated weights), run
// the Wald test, and evaluate the plug-in remainder estimates against the
// scenario's true variances.
SimulationReport run_generative_power(const ScenarioSpec& spec,
                                      const SimulationConfig& config);

// Per replication: resample n rows with replacement, redraw A ~ Bern(phat),
// generate outcomes from the fitted per-arm models plus normal noise, then
// run the same analysis pipeline. Remainder estimates use the design-phase
// variance estimates from the base data.
SimulationReport run_resample_power(const ResampleSpec& spec,
                                    const SimulationConfig& config);

// Thread count resolution: explicit request, else MSMPOWER_THREADS, else
// hardware concurrency (at least 1).
int resolve_threads(int requested);

}  // namespace msmpower
