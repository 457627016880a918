#pragma once

#include <cstddef>
#include <vector>

#include "msmpower/types.hpp"

// The analysis pipeline a designed study runs: logistic propensity model,
// inverse probability of treatment weights, Hajek/MSM estimation, and the
// stacked-estimating-equation sandwich variance.

namespace msmpower {

// Model terms: an intercept and main effects for every covariate, plus
// squared terms for the listed covariate indices.
struct ModelTerms {
  std::vector<std::size_t> quadratic;

  std::size_t parameter_count(std::size_t n_covariates) const {
    return 1 + n_covariates + quadratic.size();
  }
};

struct PropensityFit {
  std::vector<double> gamma;  // coefficients, intercept first
  ModelTerms terms;
  std::size_t n_covariates = 0;
  bool converged = false;
  int iterations = 0;
};

// Maximum-likelihood logistic regression of A on the model terms via
// iteratively reweighted least squares. Converges when the mean score drops
// below 1e-8 or the relative coefficient change drops below 1e-10; declares
// separation when any |gamma_j| exceeds 30 or a fitted probability leaves
// (1e-10, 1 - 1e-10).
PropensityFit fit_propensity(const PilotDataset& data,
                             const ModelTerms& terms = {});

// Fitted P(A=1 | L_i) for every row.
std::vector<double> fitted_propensities(const PropensityFit& fit,
                                        const PilotDataset& data);

// W_i = 1/p_i if A_i=1 else 1/(1-p_i).
WeightSet iptw_weights(const PropensityFit& fit, const PilotDataset& data);

struct HajekMeans {
  double mu0_hat = 0.0;
  double mu1_hat = 0.0;
  double ace_hat = 0.0;
};

// Per-arm Hajek (ratio) estimators and their difference.
HajekMeans hajek_means(const PilotDataset& data, const WeightSet& weights);

// Fits the MSM E(Y_a) = beta0 + beta1 a by weighted least squares and
// computes the empirical sandwich covariance of (beta0, beta1). With
// weight_treatment = estimated, the propensity score equations are stacked
// with the causal mean equations so the variance accounts for weight
// estimation; with known, the propensity block is frozen.
MsmFit fit_msm_sandwich(const PilotDataset& data, const ModelTerms& terms,
                        WeightTreatment weight_treatment);
MsmFit fit_msm_sandwich(const PilotDataset& data, const PropensityFit& fit,
                        WeightTreatment weight_treatment);

struct WaldResult {
  bool reject = false;
  double p_value = 1.0;
};

// Two-sided Wald test of beta1 = 0; rejects when |z| strictly exceeds the
// 1 - alpha/2 normal quantile.
WaldResult wald_test(const MsmFit& fit, double alpha);

// Bread matrix of the stacked system theta = (gamma, mu1, mu0), row-major
// with dimension gamma.size() + 2: the empirical mean of -d psi / d theta'.
// The analytic form is what fit_msm_sandwich uses; the central finite
// difference form exists to test it.
std::vector<double> stacked_bread_analytic(const PilotDataset& data,
                                           const PropensityFit& fit,
                                           double mu1, double mu0);
std::vector<double> stacked_bread_fd(const PilotDataset& data,
                                     const PropensityFit& fit, double mu1,
                                     double mu0);

}  // namespace msmpower
