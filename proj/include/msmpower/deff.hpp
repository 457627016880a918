#pragma once

#include <optional>
#include <span>

#include "msmpower/types.hpp"

// Design effects due to weighting, computed by three routes: exact summation
// over a discrete joint spec (outcome-invariant form), the Kish estimator on
// pilot data, and the exact form including the outcome-dependent remainder.

namespace msmpower {

// P(A=1) implied by a joint spec, exact over cells.
double treatment_prevalence(const JointDistributionSpec& spec);

// Odds of treatment k = P(A=1)/P(A=0).
double treatment_odds(const JointDistributionSpec& spec);

struct MarginalMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Marginal mean and variance of the potential outcome Y_a, exact over cells.
MarginalMoments marginal_outcome_moments(const ScenarioSpec& spec, int arm);

// Outcome-invariant design effect P(A=a) E{W^2 I(A=a)} / [E{W I(A=a)}]^2 with
// all expectations taken exactly over the finite cells.
double closed_form_deff(const JointDistributionSpec& spec, int arm);

// Kish form N_a sum(w^2 I) / {sum(w I)}^2 on pilot data with fitted weights.
// Scale-invariant in w; weights are used as provided, never re-normalized.
double kish_deff_from_pilot(const PilotDataset& data, const WeightSet& weights,
                            int arm);

struct DeffWithRemainder {
  double deff = 1.0;       // closed-form part plus remainder
  double remainder = 0.0;  // Er_a = {P(A=a)/sigma_a^2} E[{W_a - E W_a}(Y_a - mu_a)^2]
};

// Exact design effect for arm a including the outcome-dependent remainder,
// using the scenario's per-cell first and second conditional moments.
DeffWithRemainder full_deff_with_remainder(const ScenarioSpec& spec, int arm);

// One sample row for the plug-in remainder estimator: observed treatment,
// the arm-a weight 1/phat_a for this unit, and the (realized or predicted)
// outcome under arm a when available.
struct RemainderRow {
  int a = 0;
  double w_arm = 1.0;
  std::optional<double> y_arm;
};

// Plug-in estimate {N_a/(n sigma_a^2)} mean[(w - wbar)(y - ybar)^2], with the
// moment averages taken over rows that carry an arm-a outcome. N_a and n
// count all rows.
double remainder_estimate_from_sample(std::span<const RemainderRow> rows,
                                      int arm, double sigma_a_sq);

// Cauchy-Schwarz bound {p_a/sigma_a^2} sqrt(Var(W_a) Var(Y_a^2 - 2 mu_a Y_a)).
double remainder_bound(double weight_variance,
                       double outcome_transform_variance, double p_a,
                       double sigma_a_sq);

// Same bound evaluated from the exact cell moments of a scenario.
double scenario_remainder_bound(const ScenarioSpec& spec, int arm);

// n / deff.
double effective_sample_size(long n, double deff);

}  // namespace msmpower
