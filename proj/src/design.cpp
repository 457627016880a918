#include "msmpower/design.hpp"

#include <cmath>
#include <sstream>

#include "msmpower/deff.hpp"

namespace msmpower {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Wichura's algorithm AS 241 (PPND16): rational approximations on three
// regions, accurate to about 1e-16 relative.
double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream msg;
    msg << "quantile argument " << q << " must lie strictly inside (0, 1)";
    throw DomainError(msg.str());
  }
  const double p = q - 0.5;
  if (std::abs(p) <= 0.425) {
    const double r = 0.180625 - p * p;
    return p *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = (p < 0.0) ? q : 1.0 - q;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r +
                   2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) *
                    r + 3.64784832476320460504e+0) * r +
               5.76949722146069140550e+0) * r + 4.63033784615654529590e+0) * r +
             1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r +
                   5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) *
                    r + 6.89767334985100004550e-1) * r +
               1.67638483018380384940e+0) * r + 2.05319162663775882187e+0) * r +
             1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r +
                   2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) *
                    r + 2.96560571828504891230e-1) * r +
               1.78482653991729133580e+0) * r + 5.46378491116411436990e+0) * r +
             6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r +
                   1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) *
                    r + 1.48753612908506148525e-2) * r +
               1.36929880922735805310e-1) * r + 5.99832206555887937690e-1) * r +
             1.0);
  }
  return (p < 0.0) ? -value : value;
}

namespace {

void validate_inputs(const DesignInputs& inputs, bool require_nonzero_delta) {
  std::ostringstream msg;
  if (!(inputs.alpha > 0.0 && inputs.alpha < 1.0)) {
    msg << "alpha = " << inputs.alpha << " must lie in (0, 1)";
  } else if (!(inputs.power > 0.0 && inputs.power < 1.0)) {
    msg << "power = " << inputs.power << " must lie in (0, 1)";
  } else if (!std::isfinite(inputs.delta) ||
             (require_nonzero_delta && inputs.delta == 0.0)) {
    msg << "delta must be nonzero and finite";
  } else if (!(inputs.k > 0.0) || !std::isfinite(inputs.k)) {
    msg << "k = " << inputs.k << " must be positive";
  } else if (!(inputs.sigma0_sq > 0.0) || !(inputs.sigma1_sq > 0.0)) {
    msg << "variances must be positive";
  } else if (!(inputs.deff.deff0 > 0.0) || !(inputs.deff.deff1 > 0.0)) {
    msg << "design effects must be positive";
  } else {
    return;
  }
  throw InvalidInputsError(msg.str());
}

}  // namespace

void require_valid_inputs(const DesignInputs& inputs) {
  validate_inputs(inputs, true);
}

AdjustedVariances adjusted_variances(double sigma0_sq, double sigma1_sq,
                                     const DesignEffectPair& deff) {
  if (!(sigma0_sq > 0.0) || !(sigma1_sq > 0.0)) {
    throw InvalidInputsError("variances must be positive");
  }
  return {sigma0_sq * deff.deff0, sigma1_sq * deff.deff1};
}

double compute_power(long n, const DesignInputs& inputs) {
  validate_inputs(inputs, false);  // power at a null effect is alpha
  if (n < 2) throw InvalidInputsError("n must be at least 2");
  const auto adj =
      adjusted_variances(inputs.sigma0_sq, inputs.sigma1_sq, inputs.deff);
  const double p1 = inputs.k / (1.0 + inputs.k);
  const double p0 = 1.0 - p1;
  const double var_ace = adj.sigma1_adj / (static_cast<double>(n) * p1) +
                         adj.sigma0_adj / (static_cast<double>(n) * p0);
  const double d = std::abs(inputs.delta) / std::sqrt(var_ace);
  const double z = normal_quantile(1.0 - inputs.alpha / 2.0);
  // Both rejection regions; the wrong-tail term is usually negligible but
  // makes power(0) equal alpha exactly.
  return (1.0 - normal_cdf(z - d)) + normal_cdf(-z - d);
}

SampleSizeResult required_sample_size(const DesignInputs& inputs) {
  require_valid_inputs(inputs);
  const auto adj =
      adjusted_variances(inputs.sigma0_sq, inputs.sigma1_sq, inputs.deff);
  const double z_sum = normal_quantile(1.0 - inputs.alpha / 2.0) +
                       normal_quantile(inputs.power);
  const double n_raw = (1.0 + inputs.k) * z_sum * z_sum *
                       (adj.sigma1_adj / inputs.k + adj.sigma0_adj) /
                       (inputs.delta * inputs.delta);
  SampleSizeResult result;
  result.n_total = static_cast<long>(std::ceil(n_raw));
  if (result.n_total < 2) result.n_total = 2;
  const double share = inputs.k / (1.0 + inputs.k);
  long treated = std::lround(static_cast<double>(result.n_total) * share);
  treated = std::max(1l, std::min(treated, result.n_total - 1));
  result.n_treated = treated;
  result.n_control = result.n_total - treated;
  result.achieved_power = compute_power(result.n_total, inputs);
  return result;
}

DesignInputs design_inputs_from_scenario(const ScenarioSpec& spec,
                                         double alpha, double power) {
  require_valid(spec);
  DesignInputs inputs;
  inputs.alpha = alpha;
  inputs.power = power;
  inputs.delta = spec.delta;
  inputs.k = treatment_odds(spec.joint);
  inputs.sigma0_sq = marginal_outcome_moments(spec, 0).variance;
  inputs.sigma1_sq = marginal_outcome_moments(spec, 1).variance;
  inputs.deff.method = DeffMethod::closed_form;
  inputs.deff.deff0 = closed_form_deff(spec.joint, 0);
  inputs.deff.deff1 = closed_form_deff(spec.joint, 1);
  require_valid_inputs(inputs);
  return inputs;
}

}  // namespace msmpower
