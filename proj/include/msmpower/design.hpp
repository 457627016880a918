#pragma once

#include "msmpower/types.hpp"

// Sample size and power for a two-sided Wald test of the average causal
// effect, with variances inflated by per-arm design effects.

namespace msmpower {

// Inverse standard normal CDF, |error| < 1e-10 on (0, 1).
double normal_quantile(double q);

// Standard normal CDF.
double normal_cdf(double x);

// Component-wise products sigma_a^2 * deff_a.
AdjustedVariances adjusted_variances(double sigma0_sq, double sigma1_sq,
                                     const DesignEffectPair& deff);

// n = (1+k)(z_{1-a/2}+z_{1-b})^2 (s1_adj/k + s0_adj) / delta^2, rounded up,
// with the arm split n_treated = round(n k/(1+k)). achieved_power is the
// two-term normal-approximation power recomputed at the rounded total.
SampleSizeResult required_sample_size(const DesignInputs& inputs);

// Two-term normal-approximation power at sample size n. Var(ACE) uses the
// adjusted variances and P(A=1) = k/(1+k). Symmetric in the sign of delta.
double compute_power(long n, const DesignInputs& inputs);

// Derives design inputs from a scenario: delta, k, marginal variances, and
// closed-form design effects, all exact over the cells.
DesignInputs design_inputs_from_scenario(const ScenarioSpec& spec,
                                         double alpha, double power);

void require_valid_inputs(const DesignInputs& inputs);

}  // namespace msmpower
