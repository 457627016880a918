#include "msmpower/simulation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "design_matrix.hpp"
#include "msmpower/deff.hpp"
#include "msmpower/design.hpp"

namespace msmpower {

namespace {

constexpr double kMaxFailureRate = 0.01;

struct RepOutcome {
  bool completed = false;
  bool reject = false;
  bool covered = false;
  double er0 = 0.0;
  double er1 = 0.0;
  double ace = 0.0;
  double var_ace = 0.0;
  std::string error;
};

void check_config(const SimulationConfig& config) {
  if (config.n < 4) throw InvalidInputsError("simulation n must be at least 4");
  if (config.replications < 1) {
    throw InvalidInputsError("replications must be at least 1");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw InvalidInputsError("alpha must lie in (0, 1)");
  }
}

// Runs fn(r) for r in [0, count) across the requested number of threads.
// Results are indexed by r, so aggregation order never depends on the
// schedule.
template <typename Fn>
void parallel_for(long count, int threads, Fn&& fn) {
  threads = static_cast<int>(std::max(1l, std::min<long>(threads, count)));
  if (threads == 1) {
    for (long r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&]() {
      for (;;) {
        const long r = next.fetch_add(1);
        if (r >= count) break;
        fn(r);
      }
    });
  }
  for (auto& w : workers) w.join();
}

// Analysis pipeline shared by both protocols: saturated-or-specified
// propensity fit, stacked sandwich with estimated weights, Wald test, and
// the plug-in remainder estimates against the supplied variances.
RepOutcome analyze_sample(const PilotDataset& sample,
                          const std::vector<double>& y0_pot,
                          const std::vector<double>& y1_pot,
                          const ModelTerms& terms, double alpha,
                          double true_ace, double sigma0_sq,
                          double sigma1_sq) {
  RepOutcome out;
  const PropensityFit fit = fit_propensity(sample, terms);
  const MsmFit msm = fit_msm_sandwich(sample, fit, WeightTreatment::estimated);
  const WaldResult wald = wald_test(msm, alpha);
  out.reject = wald.reject;
  out.ace = msm.beta1;
  out.var_ace = msm.cov[1][1];
  const double half_width =
      normal_quantile(1.0 - alpha / 2.0) * std::sqrt(msm.cov[1][1]);
  out.covered = std::abs(msm.beta1 - true_ace) <= half_width;

  const std::vector<double> probs = fitted_propensities(fit, sample);
  const std::size_t n = sample.size();
  std::vector<RemainderRow> rows(n);
  for (int arm : {0, 1}) {
    const auto& pot = arm == 1 ? y1_pot : y0_pot;
    for (std::size_t i = 0; i < n; ++i) {
      const double p_arm = arm == 1 ? probs[i] : 1.0 - probs[i];
      rows[i] = {sample.a(i), 1.0 / p_arm, pot[i]};
    }
    const double er = remainder_estimate_from_sample(
        rows, arm, arm == 1 ? sigma1_sq : sigma0_sq);
    (arm == 1 ? out.er1 : out.er0) = er;
  }
  out.completed = true;
  return out;
}

SimulationReport aggregate(std::string scenario,
                           const std::vector<RepOutcome>& outcomes,
                           const SimulationConfig& config,
                           double population_ace) {
  long completed = 0;
  long failed = 0;
  std::string first_error;
  for (const auto& rep : outcomes) {
    if (rep.completed) {
      ++completed;
    } else {
      ++failed;
      if (first_error.empty()) first_error = rep.error;
    }
  }
  if (completed == 0) {
    throw ReplicationFailureError("every replication failed: " + first_error);
  }
  if (static_cast<double>(failed) >
      kMaxFailureRate * static_cast<double>(outcomes.size())) {
    std::ostringstream msg;
    msg << failed << " of " << outcomes.size()
        << " replications failed (first: " << first_error << ")";
    throw ReplicationFailureError(msg.str());
  }

  SimulationReport report;
  report.scenario = std::move(scenario);
  report.n_used = config.n;
  report.replications = completed;
  report.n_failed = failed;
  report.seed = config.seed;
  report.alpha = config.alpha;
  report.population_ace = population_ace;

  long rejects = 0;
  long covered = 0;
  double sum_er0 = 0.0, sum_er1 = 0.0, sum_ace = 0.0, sum_var = 0.0;
  for (const auto& rep : outcomes) {
    if (!rep.completed) continue;
    rejects += rep.reject;
    covered += rep.covered;
    sum_er0 += rep.er0;
    sum_er1 += rep.er1;
    sum_ace += rep.ace;
    sum_var += rep.var_ace;
  }
  const auto r = static_cast<double>(completed);
  report.empirical_power = static_cast<double>(rejects) / r;
  report.coverage = static_cast<double>(covered) / r;
  report.mean_er0 = sum_er0 / r;
  report.mean_er1 = sum_er1 / r;
  report.mean_ace = sum_ace / r;
  report.mean_sandwich_var = sum_var / r;
  double ss = 0.0;
  for (const auto& rep : outcomes) {
    if (!rep.completed) continue;
    const double d = rep.ace - report.mean_ace;
    ss += d * d;
  }
  report.empirical_var_ace = completed > 1 ? ss / (r - 1.0) : 0.0;
  const double p = report.empirical_power;
  report.mc_stderr = std::sqrt(p * (1.0 - p) / r);
  return report;
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MSMPOWER_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

Superpopulation generate_superpopulation(const ScenarioSpec& spec, long size,
                                         std::uint64_t seed) {
  require_valid(spec);
  if (size < 1) throw InvalidInputsError("superpopulation size must be >= 1");
  const std::size_t n_cells = spec.joint.cells.size();
  std::vector<double> cum(n_cells);
  double acc = 0.0;
  for (std::size_t c = 0; c < n_cells; ++c) {
    acc += spec.joint.cells[c].p_l;
    cum[c] = acc;
  }
  Rng rng(seed, kSuperpopulationStream);
  Superpopulation pop;
  pop.cell.resize(size);
  pop.a.resize(size);
  pop.y0.resize(size);
  pop.y1.resize(size);
  for (long i = 0; i < size; ++i) {
    const double u = rng.uniform();
    std::size_t c = 0;
    while (c + 1 < n_cells && u > cum[c]) ++c;
    pop.cell[i] = static_cast<std::uint8_t>(c);
    pop.a[i] = rng.bernoulli(spec.joint.cells[c].p_a1_given_l) ? 1 : 0;
    for (int arm : {0, 1}) {
      const OutcomeLaw& law = arm == 1 ? spec.y1[c] : spec.y0[c];
      double y;
      if (law.kind == OutcomeLaw::Kind::bernoulli) {
        y = rng.bernoulli(law.p) ? 1.0 : 0.0;
      } else {
        y = law.mean + std::sqrt(law.variance) * rng.normal();
      }
      (arm == 1 ? pop.y1 : pop.y0)[i] = y;
    }
  }
  return pop;
}

SimulationReport run_generative_power(const ScenarioSpec& spec,
                                      const SimulationConfig& config) {
  require_valid(spec);
  check_config(config);
  if (config.n > config.superpopulation_size) {
    throw InvalidInputsError("n exceeds the superpopulation size");
  }
  const Superpopulation pop = generate_superpopulation(
      spec, config.superpopulation_size, config.seed);

  double pop_ace = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) pop_ace += pop.y1[i] - pop.y0[i];
  pop_ace /= static_cast<double>(pop.size());

  const double sigma0_sq = marginal_outcome_moments(spec, 0).variance;
  const double sigma1_sq = marginal_outcome_moments(spec, 1).variance;

  // Saturated treatment model: intercept plus one dummy per non-reference
  // cell.
  const std::size_t n_cells = spec.joint.cells.size();
  std::vector<std::string> names;
  for (std::size_t c = 1; c < n_cells; ++c) {
    names.push_back("cell:" + spec.joint.cells[c].label);
  }

  const auto n = static_cast<std::size_t>(config.n);
  std::vector<RepOutcome> outcomes(config.replications);
  const int threads = resolve_threads(config.threads);
  parallel_for(config.replications, threads, [&](long r) {
    Rng rng(config.seed, static_cast<std::uint64_t>(r));
    try {
      const auto idx = sample_without_replacement(
          static_cast<std::uint32_t>(pop.size()),
          static_cast<std::uint32_t>(n), rng);
      PilotDataset sample(names);
      std::vector<double> y0_pot(n), y1_pot(n);
      std::vector<double> x(names.size());
      for (std::size_t i = 0; i < n; ++i) {
        const auto u = idx[i];
        for (std::size_t c = 1; c < n_cells; ++c) {
          x[c - 1] = pop.cell[u] == c ? 1.0 : 0.0;
        }
        sample.add_row(pop.a[u], x, pop.y(u));
        y0_pot[i] = pop.y0[u];
        y1_pot[i] = pop.y1[u];
      }
      outcomes[r] = analyze_sample(sample, y0_pot, y1_pot, ModelTerms{},
                                   config.alpha, spec.delta, sigma0_sq,
                                   sigma1_sq);
    } catch (const Error& e) {
      outcomes[r].error = std::string(e.code()) + ": " + e.what();
    }
  });
  return aggregate(spec.name, outcomes, config, pop_ace);
}

SimulationReport run_resample_power(const ResampleSpec& spec,
                                    const SimulationConfig& config) {
  check_config(config);
  const PilotDataset& base = spec.base_data;
  require_valid(base);
  const auto n_base = base.size();
  for (std::size_t i = 0; i < n_base; ++i) {
    if (!base.has_outcome(i)) {
      std::ostringstream msg;
      msg << "base data row " << i << " has no outcome";
      throw MissingOutcomeError(msg.str());
    }
  }

  // Design-phase fits on the base data: propensity model, per-arm outcome
  // regressions, and the IPTW estimate of the effect.
  const PropensityFit pfit = fit_propensity(base, spec.propensity_terms);
  const std::vector<double> phat = fitted_propensities(pfit, base);
  const WeightSet weights = iptw_weights(pfit, base);
  const HajekMeans hajek = hajek_means(base, weights);

  const Eigen::MatrixXd x_out = detail::design_matrix(base, spec.outcome_terms);
  const Eigen::VectorXd y = detail::outcome_vector(base);
  const auto p_out = x_out.cols();
  std::vector<double> yhat0(n_base), yhat1(n_base);
  double mse[2] = {0.0, 0.0};
  for (int arm : {0, 1}) {
    const long m = static_cast<long>(base.arm_count(arm));
    if (m <= p_out) {
      std::ostringstream msg;
      msg << "arm " << arm << " has " << m
          << " rows, too few for " << p_out << " outcome parameters";
      throw RankDeficiencyError(msg.str());
    }
    Eigen::MatrixXd xa(m, p_out);
    Eigen::VectorXd ya(m);
    long row = 0;
    for (std::size_t i = 0; i < n_base; ++i) {
      if (base.a(i) != arm) continue;
      xa.row(row) = x_out.row(static_cast<Eigen::Index>(i));
      ya(row) = y(static_cast<Eigen::Index>(i));
      ++row;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xa);
    if (qr.rank() < p_out) {
      std::ostringstream msg;
      msg << "outcome design for arm " << arm << " is rank deficient";
      throw RankDeficiencyError(msg.str());
    }
    const Eigen::VectorXd coef = qr.solve(ya);
    const double ssr = (ya - xa * coef).squaredNorm();
    mse[arm] = ssr / static_cast<double>(m - p_out);
    const Eigen::VectorXd pred = x_out * coef;
    for (std::size_t i = 0; i < n_base; ++i) {
      (arm == 1 ? yhat1 : yhat0)[i] = pred(static_cast<Eigen::Index>(i));
    }
  }

  // Shift the arm-0 predictions so the synthetic population's effect equals
  // target_ace (the IPTW estimate plays the role of the observed effect).
  const double shift = hajek.ace_hat - spec.target_ace;
  for (auto& v : yhat0) v += shift;
  double pop_ace = 0.0;
  for (std::size_t i = 0; i < n_base; ++i) pop_ace += yhat1[i] - yhat0[i];
  pop_ace /= static_cast<double>(n_base);

  // Design-phase variance estimates sigma_a^2 = E(Y_a^2) - E(Y_a)^2 from
  // weighted MSM fits; these feed the remainder estimator denominators.
  double sigma_sq[2] = {0.0, 0.0};
  for (int arm : {0, 1}) {
    double sw = 0.0, swy = 0.0, swy2 = 0.0;
    for (std::size_t i = 0; i < n_base; ++i) {
      if (base.a(i) != arm) continue;
      const double w = weights.entries[i].w;
      sw += w;
      swy += w * base.y(i);
      swy2 += w * base.y(i) * base.y(i);
    }
    const double mean = swy / sw;
    sigma_sq[arm] = swy2 / sw - mean * mean;
    if (!(sigma_sq[arm] > 0.0)) {
      throw DegenerateVarianceError("design-phase outcome variance not positive");
    }
  }

  const auto n = static_cast<std::size_t>(config.n);
  std::vector<RepOutcome> outcomes(config.replications);
  const int threads = resolve_threads(config.threads);
  parallel_for(config.replications, threads, [&](long r) {
    Rng rng(config.seed, static_cast<std::uint64_t>(r));
    try {
      PilotDataset sample(base.covariate_names());
      std::vector<double> y0_pot(n), y1_pot(n);
      std::vector<double> x(base.arity());
      for (std::size_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(rng.below(n_base));
        const int a = rng.bernoulli(phat[u]) ? 1 : 0;
        const double y0 = yhat0[u] + std::sqrt(mse[0]) * rng.normal();
        const double y1 = yhat1[u] + std::sqrt(mse[1]) * rng.normal();
        for (std::size_t j = 0; j < base.arity(); ++j) x[j] = base.x(u, j);
        sample.add_row(a, x, a == 1 ? y1 : y0);
        y0_pot[i] = y0;
        y1_pot[i] = y1;
      }
      outcomes[r] =
          analyze_sample(sample, y0_pot, y1_pot, spec.propensity_terms,
                         config.alpha, spec.target_ace, sigma_sq[0],
                         sigma_sq[1]);
    } catch (const Error& e) {
      outcomes[r].error = std::string(e.code()) + ": " + e.what();
    }
  });
  return aggregate(spec.name, outcomes, config, pop_ace);
}

}  // namespace msmpower
