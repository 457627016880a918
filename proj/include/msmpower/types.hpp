#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msmpower/errors.hpp"

// Shared domain types and their invariants. All types are immutable value
// types once constructed (PilotDataset grows only through add_row) and are
// safe to share across threads.

namespace msmpower {

// ---------------------------------------------------------------------------
// Discrete joint law of confounder cells and treatment probabilities
// ---------------------------------------------------------------------------

struct ConfounderCell {
  std::string label;
  double p_l = 0.0;           // P(L = l)
  double p_a1_given_l = 0.0;  // P(A = 1 | L = l), strictly inside (0, 1)
};

struct JointDistributionSpec {
  std::vector<ConfounderCell> cells;
};

// ---------------------------------------------------------------------------
// Per-cell outcome laws for scenario specifications
// ---------------------------------------------------------------------------

struct OutcomeLaw {
  enum class Kind { bernoulli, normal };

  Kind kind = Kind::bernoulli;
  double p = 0.0;         // bernoulli success probability
  double mean = 0.0;      // normal mean
  double variance = 0.0;  // normal variance

  static OutcomeLaw make_bernoulli(double p) {
    OutcomeLaw law;
    law.kind = Kind::bernoulli;
    law.p = p;
    return law;
  }
  static OutcomeLaw make_normal(double mean, double variance) {
    OutcomeLaw law;
    law.kind = Kind::normal;
    law.mean = mean;
    law.variance = variance;
    return law;
  }

  // E(Y^k) for k in 1..4, exact for both law kinds.
  double moment(int k) const;
};

// Full generative specification of a simulation scenario: confounder cells,
// treatment model, and per-cell laws for both potential outcomes.
struct ScenarioSpec {
  std::string name;
  JointDistributionSpec joint;
  std::vector<OutcomeLaw> y0;  // aligned with joint.cells
  std::vector<OutcomeLaw> y1;
  double delta = 0.0;          // implied marginal E(Y1) - E(Y0)
};

// ---------------------------------------------------------------------------
// Pilot data
// ---------------------------------------------------------------------------

// Rows of (treatment, covariate vector, optional outcome) with a fixed
// covariate arity. Stored flat to keep large pilot datasets cheap.
class PilotDataset {
 public:
  PilotDataset() = default;
  explicit PilotDataset(std::vector<std::string> covariate_names);

  void add_row(int a, std::span<const double> x,
               std::optional<double> y = std::nullopt);

  std::size_t size() const { return a_.size(); }
  std::size_t arity() const { return covariate_names_.size(); }
  int a(std::size_t i) const { return a_[i]; }
  double x(std::size_t i, std::size_t j) const { return x_[i * arity() + j]; }
  bool has_outcome(std::size_t i) const { return has_y_[i] != 0; }
  double y(std::size_t i) const { return y_[i]; }
  const std::vector<std::string>& covariate_names() const {
    return covariate_names_;
  }

  std::size_t arm_count(int arm) const;

 private:
  std::vector<std::string> covariate_names_;
  std::vector<std::int8_t> a_;
  std::vector<double> x_;  // row-major, size() * arity()
  std::vector<double> y_;
  std::vector<std::uint8_t> has_y_;
};

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

struct WeightEntry {
  int a = 0;
  double w = 1.0;  // inverse probability of the observed treatment
};

struct WeightSet {
  std::vector<WeightEntry> entries;
};

// ---------------------------------------------------------------------------
// Design effects and design inputs
// ---------------------------------------------------------------------------

enum class DeffMethod { closed_form, pilot_kish, full_with_remainder };

struct DesignEffectPair {
  double deff0 = 1.0;
  double deff1 = 1.0;
  DeffMethod method = DeffMethod::closed_form;
  std::optional<double> remainder0;  // present iff method == full_with_remainder
  std::optional<double> remainder1;
};

// RCT-style assumptions plus design effects; the inputs to Proposition-3
// style sample size and power calculations.
struct DesignInputs {
  double alpha = 0.05;      // two-sided type I error
  double power = 0.80;      // target 1 - beta
  double delta = 0.0;       // effect size in outcome units, nonzero
  double k = 1.0;           // odds of treatment P(A=1)/P(A=0)
  double sigma0_sq = 1.0;   // Var(Y0)
  double sigma1_sq = 1.0;   // Var(Y1)
  DesignEffectPair deff;
};

struct AdjustedVariances {
  double sigma0_adj = 0.0;  // sigma0_sq * deff0
  double sigma1_adj = 0.0;  // sigma1_sq * deff1
};

struct SampleSizeResult {
  long n_total = 0;
  long n_treated = 0;
  long n_control = 0;
  double achieved_power = 0.0;  // power recomputed at the rounded n
};

// ---------------------------------------------------------------------------
// Estimation results
// ---------------------------------------------------------------------------

enum class WeightTreatment { estimated, known };

// Fitted MSM intercept/slope with the sandwich covariance of (beta0, beta1).
struct MsmFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  std::array<std::array<double, 2>, 2> cov{{{0.0, 0.0}, {0.0, 0.0}}};
  double wald_z = 0.0;
  double p_value = 1.0;
  WeightTreatment weights_treated_as = WeightTreatment::estimated;
};

// ---------------------------------------------------------------------------
// Simulation reporting
// ---------------------------------------------------------------------------

struct SimulationReport {
  std::string scenario;
  long n_used = 0;
  long replications = 0;  // completed replications (power denominator)
  long n_failed = 0;      // failed replications, excluded from power
  std::uint64_t seed = 0;
  double alpha = 0.05;
  double empirical_power = 0.0;
  double mean_er0 = 0.0;
  double mean_er1 = 0.0;
  double mc_stderr = 0.0;  // sqrt(p(1-p)/replications)
  // Diagnostics beyond the headline numbers: all derived from the same runs.
  double mean_ace = 0.0;
  double empirical_var_ace = 0.0;
  double mean_sandwich_var = 0.0;
  double coverage = 0.0;        // Wald CI coverage of the true effect
  double population_ace = 0.0;  // realized effect in the simulated population
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationIssue {
  std::string code;  // matches an error class name
  std::string message;
  std::optional<std::size_t> index;  // offending cell/row when applicable
};

std::vector<ValidationIssue> validate(const JointDistributionSpec& spec);
std::vector<ValidationIssue> validate(const ScenarioSpec& spec);
std::vector<ValidationIssue> validate(const PilotDataset& data);

// Throws the typed error corresponding to the first issue, if any.
void require_valid(const JointDistributionSpec& spec);
void require_valid(const ScenarioSpec& spec);
void require_valid(const PilotDataset& data);

[[noreturn]] void throw_issue(const ValidationIssue& issue);

// Tolerances used by validate().
inline constexpr double kProbabilityMassTol = 1e-12;
inline constexpr double kDeltaConsistencyTol = 1e-9;

}  // namespace msmpower
