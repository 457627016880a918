#include "msmpower/deff.hpp"

#include <cmath>
#include <sstream>

namespace msmpower {

namespace {

// P(A=a | L=l) for the requested arm.
double arm_probability(const ConfounderCell& cell, int arm) {
  return arm == 1 ? cell.p_a1_given_l : 1.0 - cell.p_a1_given_l;
}

void check_arm(int arm) {
  if (arm != 0 && arm != 1) {
    std::ostringstream msg;
    msg << "arm must be 0 or 1, got " << arm;
    throw InvalidInputsError(msg.str());
  }
}

const std::vector<OutcomeLaw>& arm_laws(const ScenarioSpec& spec, int arm) {
  return arm == 1 ? spec.y1 : spec.y0;
}

}  // namespace

double treatment_prevalence(const JointDistributionSpec& spec) {
  require_valid(spec);
  double p = 0.0;
  for (const auto& cell : spec.cells) p += cell.p_l * cell.p_a1_given_l;
  return p;
}

double treatment_odds(const JointDistributionSpec& spec) {
  const double p = treatment_prevalence(spec);
  return p / (1.0 - p);
}

MarginalMoments marginal_outcome_moments(const ScenarioSpec& spec, int arm) {
  check_arm(arm);
  require_valid(spec);
  const auto& laws = arm_laws(spec, arm);
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < spec.joint.cells.size(); ++i) {
    mean += spec.joint.cells[i].p_l * laws[i].moment(1);
    second += spec.joint.cells[i].p_l * laws[i].moment(2);
  }
  return {mean, second - mean * mean};
}

double closed_form_deff(const JointDistributionSpec& spec, int arm) {
  check_arm(arm);
  require_valid(spec);
  // With W = 1/P(A=a|L) on arm a:
  //   E{W I(A=a)}   = sum_l P(l)              = 1
  //   E{W^2 I(A=a)} = sum_l P(l) / P(A=a|l)
  double p_a = 0.0;
  double ew_i = 0.0;
  double ew2_i = 0.0;
  for (const auto& cell : spec.cells) {
    const double q = arm_probability(cell, arm);
    p_a += cell.p_l * q;
    ew_i += cell.p_l;
    ew2_i += cell.p_l / q;
  }
  return p_a * ew2_i / (ew_i * ew_i);
}

double kish_deff_from_pilot(const PilotDataset& data, const WeightSet& weights,
                            int arm) {
  check_arm(arm);
  if (weights.entries.size() != data.size()) {
    std::ostringstream msg;
    msg << "weight set has " << weights.entries.size() << " entries for "
        << data.size() << " rows";
    throw AlignmentError(msg.str());
  }
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  std::size_t n_arm = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (weights.entries[i].a != data.a(i)) {
      std::ostringstream msg;
      msg << "weight entry " << i << " treatment disagrees with data row";
      throw AlignmentError(msg.str());
    }
    if (data.a(i) != arm) continue;
    const double w = weights.entries[i].w;
    sum_w += w;
    sum_w2 += w * w;
    ++n_arm;
  }
  if (n_arm == 0) {
    std::ostringstream msg;
    msg << "treatment arm " << arm << " is empty";
    throw EmptyArmError(msg.str());
  }
  return static_cast<double>(n_arm) * sum_w2 / (sum_w * sum_w);
}

DeffWithRemainder full_deff_with_remainder(const ScenarioSpec& spec, int arm) {
  check_arm(arm);
  require_valid(spec);
  const auto& laws = arm_laws(spec, arm);
  const auto moments = marginal_outcome_moments(spec, arm);
  const double mu = moments.mean;
  const double sigma_sq = moments.variance;

  double p_a = 0.0;
  double ew = 0.0;  // E(W_a) over the marginal law of L
  for (const auto& cell : spec.joint.cells) {
    const double q = arm_probability(cell, arm);
    p_a += cell.p_l * q;
    ew += cell.p_l / q;
  }
  // R = E[{W_a - E(W_a)}(Y_a - mu)^2] with E[(Y_a - mu)^2 | l] from the first
  // two conditional moments.
  double r = 0.0;
  for (std::size_t i = 0; i < spec.joint.cells.size(); ++i) {
    const auto& cell = spec.joint.cells[i];
    const double w = 1.0 / arm_probability(cell, arm);
    const double centered_second =
        laws[i].moment(2) - 2.0 * mu * laws[i].moment(1) + mu * mu;
    r += cell.p_l * (w - ew) * centered_second;
  }
  const double remainder = p_a / sigma_sq * r;
  return {closed_form_deff(spec.joint, arm) + remainder, remainder};
}

double remainder_estimate_from_sample(std::span<const RemainderRow> rows,
                                      int arm, double sigma_a_sq) {
  check_arm(arm);
  if (!(sigma_a_sq > 0.0)) {
    throw InvalidInputsError("sigma_a_sq must be positive");
  }
  const std::size_t n = rows.size();
  std::size_t n_arm = 0;
  std::size_t n_outcome = 0;
  double sum_w = 0.0;
  double sum_y = 0.0;
  for (const auto& row : rows) {
    n_arm += (row.a == arm);
    if (row.y_arm.has_value()) {
      ++n_outcome;
      sum_w += row.w_arm;
      sum_y += *row.y_arm;
    }
  }
  if (n_outcome == 0) {
    throw MissingOutcomeError("no rows carry an outcome for the requested arm");
  }
  const double mean_w = sum_w / static_cast<double>(n_outcome);
  const double mean_y = sum_y / static_cast<double>(n_outcome);
  double acc = 0.0;
  for (const auto& row : rows) {
    if (!row.y_arm.has_value()) continue;
    const double dy = *row.y_arm - mean_y;
    acc += (row.w_arm - mean_w) * dy * dy;
  }
  acc /= static_cast<double>(n_outcome);
  return static_cast<double>(n_arm) / (static_cast<double>(n) * sigma_a_sq) *
         acc;
}

double remainder_bound(double weight_variance,
                       double outcome_transform_variance, double p_a,
                       double sigma_a_sq) {
  if (weight_variance < 0.0 || outcome_transform_variance < 0.0) {
    throw InvalidInputsError("variances must be non-negative");
  }
  if (!(sigma_a_sq > 0.0)) {
    throw InvalidInputsError("sigma_a_sq must be positive");
  }
  return p_a / sigma_a_sq *
         std::sqrt(weight_variance * outcome_transform_variance);
}

double scenario_remainder_bound(const ScenarioSpec& spec, int arm) {
  check_arm(arm);
  require_valid(spec);
  const auto& laws = arm_laws(spec, arm);
  const auto moments = marginal_outcome_moments(spec, arm);
  const double mu = moments.mean;

  double p_a = 0.0;
  double ew = 0.0;
  double ew2 = 0.0;
  double et = 0.0;   // E(T), T = Y^2 - 2 mu Y
  double et2 = 0.0;  // E(T^2), needs conditional moments up to order 4
  for (std::size_t i = 0; i < spec.joint.cells.size(); ++i) {
    const auto& cell = spec.joint.cells[i];
    const double q = arm_probability(cell, arm);
    const double w = 1.0 / q;
    p_a += cell.p_l * q;
    ew += cell.p_l * w;
    ew2 += cell.p_l * w * w;
    const double m1 = laws[i].moment(1);
    const double m2 = laws[i].moment(2);
    const double m3 = laws[i].moment(3);
    const double m4 = laws[i].moment(4);
    et += cell.p_l * (m2 - 2.0 * mu * m1);
    et2 += cell.p_l * (m4 - 4.0 * mu * m3 + 4.0 * mu * mu * m2);
  }
  const double var_w = ew2 - ew * ew;
  const double var_t = et2 - et * et;
  return remainder_bound(std::max(var_w, 0.0), std::max(var_t, 0.0), p_a,
                         moments.variance);
}

double effective_sample_size(long n, double deff) {
  if (n < 1) throw InvalidInputsError("n must be at least 1");
  if (!(deff > 0.0)) throw InvalidInputsError("deff must be positive");
  return static_cast<double>(n) / deff;
}

}  // namespace msmpower
