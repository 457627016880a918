#include "msmpower/estimation.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

#include "design_matrix.hpp"
#include "msmpower/design.hpp"

namespace msmpower {

using detail::design_matrix;
using detail::outcome_vector;
using detail::treatment_vector;

namespace {

constexpr double kIrlsProbFloor = 1e-10;
constexpr double kGammaBound = 30.0;
constexpr double kScoreTol = 1e-8;
constexpr double kCoefTol = 1e-10;
constexpr int kMaxIterations = 100;
constexpr double kWeightProbEps = 1e-12;

double expit(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

Eigen::VectorXd linear_predictor_probs(const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& gamma) {
  Eigen::VectorXd eta = x * gamma;
  return eta.unaryExpr([](double e) { return expit(e); });
}

// psi means for the stacked system at theta = (gamma, mu1, mu0); used by the
// finite-difference bread.
Eigen::VectorXd stacked_psi_mean(const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& gamma, double mu1,
                                 double mu0) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p + 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double prob = expit(x.row(i).dot(gamma));
    const double resid = a(i) - prob;
    g.head(p) += resid * x.row(i).transpose();
    if (a(i) > 0.5) {
      g(p) += (y(i) - mu1) / prob;
    } else {
      g(p + 1) += (y(i) - mu0) / (1.0 - prob);
    }
  }
  return g / static_cast<double>(n);
}

Eigen::MatrixXd bread_analytic(const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& a,
                               const Eigen::VectorXd& y,
                               const Eigen::VectorXd& probs, double mu1,
                               double mu0) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd bread = Eigen::MatrixXd::Zero(p + 2, p + 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double prob = probs(i);
    const auto xi = x.row(i);
    bread.topLeftCorner(p, p) += prob * (1.0 - prob) * xi.transpose() * xi;
    if (a(i) > 0.5) {
      // -d/dgamma of A (y - mu1)/p = A (y - mu1)(1-p)/p x
      bread.row(p).head(p) += (y(i) - mu1) * (1.0 - prob) / prob * xi;
      bread(p, p) += 1.0 / prob;
    } else {
      bread.row(p + 1).head(p) -= (y(i) - mu0) * prob / (1.0 - prob) * xi;
      bread(p + 1, p + 1) += 1.0 / (1.0 - prob);
    }
  }
  return bread / static_cast<double>(n);
}

struct MuBlocks {
  double a11 = 0.0;  // mean(W A)
  double a00 = 0.0;  // mean(W (1-A))
  double b11 = 0.0;  // mean(psi1^2)
  double b00 = 0.0;  // mean(psi0^2)
};

MuBlocks mu_blocks(const Eigen::VectorXd& a, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& probs, double mu1, double mu0) {
  MuBlocks m;
  const Eigen::Index n = a.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a(i) > 0.5) {
      const double w = 1.0 / probs(i);
      const double psi = w * (y(i) - mu1);
      m.a11 += w;
      m.b11 += psi * psi;
    } else {
      const double w = 1.0 / (1.0 - probs(i));
      const double psi = w * (y(i) - mu0);
      m.a00 += w;
      m.b00 += psi * psi;
    }
  }
  m.a11 /= static_cast<double>(n);
  m.a00 /= static_cast<double>(n);
  m.b11 /= static_cast<double>(n);
  m.b00 /= static_cast<double>(n);
  return m;
}

}  // namespace

PropensityFit fit_propensity(const PilotDataset& data,
                             const ModelTerms& terms) {
  for (int arm : {0, 1}) {
    if (data.arm_count(arm) < 2) {
      std::ostringstream msg;
      msg << "treatment arm " << arm << " has fewer than 2 rows";
      throw EmptyArmError(msg.str());
    }
  }
  const Eigen::MatrixXd x = design_matrix(data, terms);
  const Eigen::VectorXd a = treatment_vector(data);
  const Eigen::Index p = x.cols();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < p) {
    std::ostringstream msg;
    msg << "design matrix rank " << qr.rank() << " < " << p << " columns";
    throw RankDeficiencyError(msg.str());
  }

  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(p);
  bool converged = false;
  int iterations = 0;
  while (iterations < kMaxIterations) {
    ++iterations;
    const Eigen::VectorXd probs = linear_predictor_probs(x, gamma);
    if ((probs.array() <= kIrlsProbFloor).any() ||
        (probs.array() >= 1.0 - kIrlsProbFloor).any()) {
      throw SeparationError("fitted probabilities pinned to the boundary");
    }
    const Eigen::VectorXd score =
        x.transpose() * (a - probs) / static_cast<double>(x.rows());
    if (score.cwiseAbs().maxCoeff() < kScoreTol) {
      converged = true;
      break;
    }
    const Eigen::VectorXd w = probs.array() * (1.0 - probs.array());
    const Eigen::MatrixXd info =
        x.transpose() * w.asDiagonal() * x / static_cast<double>(x.rows());
    const Eigen::VectorXd step = info.ldlt().solve(score);
    gamma += step;
    if (gamma.cwiseAbs().maxCoeff() > kGammaBound) {
      throw SeparationError("coefficients diverged beyond +/-30");
    }
    double rel_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      rel_change = std::max(
          rel_change, std::abs(step(j)) / std::max(1.0, std::abs(gamma(j))));
    }
    if (rel_change < kCoefTol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NonConvergenceError("IRLS did not converge within 100 iterations");
  }

  PropensityFit fit;
  fit.gamma.assign(gamma.data(), gamma.data() + p);
  fit.terms = terms;
  fit.n_covariates = data.arity();
  fit.converged = true;
  fit.iterations = iterations;
  return fit;
}

std::vector<double> fitted_propensities(const PropensityFit& fit,
                                        const PilotDataset& data) {
  if (data.arity() != fit.n_covariates) {
    throw AlignmentError("dataset arity does not match the fitted model");
  }
  const Eigen::MatrixXd x = design_matrix(data, fit.terms);
  const Eigen::Map<const Eigen::VectorXd> gamma(fit.gamma.data(),
                                                fit.gamma.size());
  const Eigen::VectorXd probs = linear_predictor_probs(x, gamma);
  return {probs.data(), probs.data() + probs.size()};
}

WeightSet iptw_weights(const PropensityFit& fit, const PilotDataset& data) {
  if (!fit.converged) {
    throw NonConvergenceError("propensity fit did not converge");
  }
  const auto probs = fitted_propensities(fit, data);
  WeightSet weights;
  weights.entries.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double prob = probs[i];
    if (!(prob > kWeightProbEps) || !(prob < 1.0 - kWeightProbEps)) {
      std::ostringstream msg;
      msg << "fitted propensity " << prob << " at row " << i
          << " leaves (0, 1)";
      throw PositivityError(msg.str());
    }
    const int a = data.a(i);
    weights.entries.push_back({a, a == 1 ? 1.0 / prob : 1.0 / (1.0 - prob)});
  }
  return weights;
}

HajekMeans hajek_means(const PilotDataset& data, const WeightSet& weights) {
  if (weights.entries.size() != data.size()) {
    throw AlignmentError("weight set not aligned with data rows");
  }
  double num0 = 0.0, den0 = 0.0, num1 = 0.0, den1 = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data.has_outcome(i)) {
      std::ostringstream msg;
      msg << "row " << i << " has no outcome";
      throw MissingOutcomeError(msg.str());
    }
    const double w = weights.entries[i].w;
    if (data.a(i) == 1) {
      num1 += w * data.y(i);
      den1 += w;
    } else {
      num0 += w * data.y(i);
      den0 += w;
    }
  }
  if (den0 <= 0.0 || den1 <= 0.0) {
    throw EmptyArmError("both treatment arms must be non-empty");
  }
  HajekMeans means;
  means.mu0_hat = num0 / den0;
  means.mu1_hat = num1 / den1;
  means.ace_hat = means.mu1_hat - means.mu0_hat;
  return means;
}

MsmFit fit_msm_sandwich(const PilotDataset& data, const ModelTerms& terms,
                        WeightTreatment weight_treatment) {
  return fit_msm_sandwich(data, fit_propensity(data, terms), weight_treatment);
}

MsmFit fit_msm_sandwich(const PilotDataset& data, const PropensityFit& fit,
                        WeightTreatment weight_treatment) {
  const Eigen::MatrixXd x = design_matrix(data, fit.terms);
  const Eigen::VectorXd a = treatment_vector(data);
  const Eigen::VectorXd y = outcome_vector(data);
  const Eigen::Map<const Eigen::VectorXd> gamma(fit.gamma.data(),
                                                fit.gamma.size());
  const Eigen::VectorXd probs = linear_predictor_probs(x, gamma);
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();

  // Weighted least squares for E(Y_a) = beta0 + beta1 a.
  double s_w = 0.0, s_wa = 0.0, s_wy = 0.0, s_way = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double prob = probs(i);
    if (!(prob > kWeightProbEps) || !(prob < 1.0 - kWeightProbEps)) {
      throw PositivityError("fitted propensity leaves (0, 1)");
    }
    const double w = a(i) > 0.5 ? 1.0 / prob : 1.0 / (1.0 - prob);
    s_w += w;
    s_wa += w * a(i);
    s_wy += w * y(i);
    s_way += w * a(i) * y(i);
  }
  if (s_wa <= 0.0 || s_w - s_wa <= 0.0) {
    throw EmptyArmError("both treatment arms must be non-empty");
  }
  Eigen::Matrix2d xtwx;
  xtwx << s_w, s_wa, s_wa, s_wa;
  Eigen::Vector2d xtwy(s_wy, s_way);
  const Eigen::Vector2d beta = xtwx.fullPivLu().solve(xtwy);
  const double mu1 = beta(0) + beta(1);
  const double mu0 = beta(0);

  // Sandwich covariance of (mu1, mu0).
  Eigen::Matrix2d v_mu;
  if (weight_treatment == WeightTreatment::known) {
    const MuBlocks m = mu_blocks(a, y, probs, mu1, mu0);
    v_mu.setZero();
    v_mu(0, 0) = m.b11 / (m.a11 * m.a11);
    v_mu(1, 1) = m.b00 / (m.a00 * m.a00);
    v_mu /= static_cast<double>(n);
  } else {
    const Eigen::MatrixXd bread = bread_analytic(x, a, y, probs, mu1, mu0);
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p + 2, p + 2);
    Eigen::VectorXd psi(p + 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double prob = probs(i);
      psi.head(p) = (a(i) - prob) * x.row(i).transpose();
      if (a(i) > 0.5) {
        psi(p) = (y(i) - mu1) / prob;
        psi(p + 1) = 0.0;
      } else {
        psi(p) = 0.0;
        psi(p + 1) = (y(i) - mu0) / (1.0 - prob);
      }
      meat.noalias() += psi * psi.transpose();
    }
    meat /= static_cast<double>(n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(bread);
    if (!lu.isInvertible()) {
      throw SingularBreadError("stacked bread matrix is singular");
    }
    const Eigen::MatrixXd bread_inv = lu.inverse();
    const Eigen::MatrixXd v_full =
        bread_inv * meat * bread_inv.transpose() / static_cast<double>(n);
    v_mu = v_full.bottomRightCorner(2, 2);
  }

  // Map (mu1, mu0) to the MSM parameters (beta0, beta1) = (mu0, mu1 - mu0).
  Eigen::Matrix2d jac;
  jac << 0.0, 1.0, 1.0, -1.0;
  const Eigen::Matrix2d v_beta = jac * v_mu * jac.transpose();

  MsmFit out;
  out.beta0 = mu0;
  out.beta1 = mu1 - mu0;
  out.cov = {{{v_beta(0, 0), v_beta(0, 1)}, {v_beta(1, 0), v_beta(1, 1)}}};
  out.weights_treated_as = weight_treatment;
  if (!(v_beta(1, 1) > 0.0)) {
    throw DegenerateVarianceError("Var(beta1) is not positive");
  }
  out.wald_z = out.beta1 / std::sqrt(v_beta(1, 1));
  out.p_value = 2.0 * (1.0 - normal_cdf(std::abs(out.wald_z)));
  return out;
}

WaldResult wald_test(const MsmFit& fit, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInputsError("alpha must lie in (0, 1)");
  }
  if (!(fit.cov[1][1] > 0.0)) {
    throw DegenerateVarianceError("Var(beta1) is not positive");
  }
  WaldResult result;
  result.p_value = fit.p_value;
  result.reject = std::abs(fit.wald_z) > normal_quantile(1.0 - alpha / 2.0);
  return result;
}

std::vector<double> stacked_bread_analytic(const PilotDataset& data,
                                           const PropensityFit& fit,
                                           double mu1, double mu0) {
  const Eigen::MatrixXd x = design_matrix(data, fit.terms);
  const Eigen::VectorXd a = treatment_vector(data);
  const Eigen::VectorXd y = outcome_vector(data);
  const Eigen::Map<const Eigen::VectorXd> gamma(fit.gamma.data(),
                                                fit.gamma.size());
  const Eigen::VectorXd probs = linear_predictor_probs(x, gamma);
  const Eigen::MatrixXd bread = bread_analytic(x, a, y, probs, mu1, mu0);
  std::vector<double> out(bread.size());
  for (Eigen::Index r = 0; r < bread.rows(); ++r) {
    for (Eigen::Index c = 0; c < bread.cols(); ++c) {
      out[static_cast<std::size_t>(r * bread.cols() + c)] = bread(r, c);
    }
  }
  return out;
}

std::vector<double> stacked_bread_fd(const PilotDataset& data,
                                     const PropensityFit& fit, double mu1,
                                     double mu0) {
  const Eigen::MatrixXd x = design_matrix(data, fit.terms);
  const Eigen::VectorXd a = treatment_vector(data);
  const Eigen::VectorXd y = outcome_vector(data);
  const Eigen::Index p = x.cols();
  Eigen::VectorXd theta(p + 2);
  for (Eigen::Index j = 0; j < p; ++j) theta(j) = fit.gamma[j];
  theta(p) = mu1;
  theta(p + 1) = mu0;

  const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  Eigen::MatrixXd jac(p + 2, p + 2);
  for (Eigen::Index j = 0; j < p + 2; ++j) {
    const double h = h0 * std::max(1.0, std::abs(theta(j)));
    Eigen::VectorXd hi = theta, lo = theta;
    hi(j) += h;
    lo(j) -= h;
    const Eigen::VectorXd g_hi =
        stacked_psi_mean(x, a, y, hi.head(p), hi(p), hi(p + 1));
    const Eigen::VectorXd g_lo =
        stacked_psi_mean(x, a, y, lo.head(p), lo(p), lo(p + 1));
    jac.col(j) = (g_hi - g_lo) / (2.0 * h);
  }
  const Eigen::MatrixXd bread = -jac;
  std::vector<double> out(bread.size());
  for (Eigen::Index r = 0; r < bread.rows(); ++r) {
    for (Eigen::Index c = 0; c < bread.cols(); ++c) {
      out[static_cast<std::size_t>(r * bread.cols() + c)] = bread(r, c);
    }
  }
  return out;
}

}  // namespace msmpower
