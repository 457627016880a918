#include "msmpower/types.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace msmpower {

double OutcomeLaw::moment(int k) const {
  if (kind == Kind::bernoulli) {
    return p;  // Y in {0,1}: E(Y^k) = p for every k >= 1
  }
  const double m = mean;
  const double v = variance;
  switch (k) {
    case 1: return m;
    case 2: return m * m + v;
    case 3: return m * m * m + 3.0 * m * v;
    case 4: return m * m * m * m + 6.0 * m * m * v + 3.0 * v * v;
    default: throw DomainError("outcome moment order must be 1..4");
  }
}

PilotDataset::PilotDataset(std::vector<std::string> covariate_names)
    : covariate_names_(std::move(covariate_names)) {}

void PilotDataset::add_row(int a, std::span<const double> x,
                           std::optional<double> y) {
  if (x.size() != arity()) {
    std::ostringstream msg;
    msg << "row " << size() << " has " << x.size() << " covariates, expected "
        << arity();
    throw AlignmentError(msg.str());
  }
  if (a != 0 && a != 1) {
    std::ostringstream msg;
    msg << "row " << size() << " treatment must be 0 or 1, got " << a;
    throw ParseError(msg.str());
  }
  a_.push_back(static_cast<std::int8_t>(a));
  x_.insert(x_.end(), x.begin(), x.end());
  y_.push_back(y.value_or(std::numeric_limits<double>::quiet_NaN()));
  has_y_.push_back(y.has_value() ? 1 : 0);
}

std::size_t PilotDataset::arm_count(int arm) const {
  std::size_t count = 0;
  for (auto a : a_) count += (a == arm);
  return count;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

void append(std::vector<ValidationIssue>& issues, std::string code,
            std::string message,
            std::optional<std::size_t> index = std::nullopt) {
  issues.push_back({std::move(code), std::move(message), index});
}

}  // namespace

std::vector<ValidationIssue> validate(const JointDistributionSpec& spec) {
  std::vector<ValidationIssue> issues;
  if (spec.cells.empty()) {
    append(issues, "ProbabilityMassError", "spec has no cells");
    return issues;
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < spec.cells.size(); ++i) {
    const auto& cell = spec.cells[i];
    if (!(cell.p_l >= 0.0) || !(cell.p_l <= 1.0) || !std::isfinite(cell.p_l)) {
      std::ostringstream msg;
      msg << "cell " << i << " p_l = " << cell.p_l << " outside [0, 1]";
      append(issues, "ProbabilityMassError", msg.str(), i);
    }
    if (!(cell.p_a1_given_l > 0.0) || !(cell.p_a1_given_l < 1.0)) {
      std::ostringstream msg;
      msg << "cell " << i << " p_a1_given_l = " << cell.p_a1_given_l
          << " must lie strictly inside (0, 1)";
      append(issues, "PositivityError", msg.str(), i);
    }
    mass += cell.p_l;
  }
  if (std::abs(mass - 1.0) > kProbabilityMassTol) {
    std::ostringstream msg;
    msg << "cell probabilities sum to " << mass << ", expected 1";
    append(issues, "ProbabilityMassError", msg.str());
  }
  return issues;
}

std::vector<ValidationIssue> validate(const ScenarioSpec& spec) {
  std::vector<ValidationIssue> issues = validate(spec.joint);
  const std::size_t n = spec.joint.cells.size();
  if (spec.y0.size() != n || spec.y1.size() != n) {
    std::ostringstream msg;
    msg << "outcome laws (" << spec.y0.size() << ", " << spec.y1.size()
        << ") not aligned with " << n << " cells";
    append(issues, "AlignmentError", msg.str());
    return issues;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (const OutcomeLaw* law : {&spec.y0[i], &spec.y1[i]}) {
      if (law->kind == OutcomeLaw::Kind::bernoulli) {
        if (!(law->p >= 0.0 && law->p <= 1.0)) {
          std::ostringstream msg;
          msg << "cell " << i << " bernoulli p = " << law->p
              << " outside [0, 1]";
          append(issues, "InvalidInputsError", msg.str(), i);
        }
      } else if (!(law->variance > 0.0)) {
        std::ostringstream msg;
        msg << "cell " << i << " normal variance = " << law->variance
            << " must be positive";
        append(issues, "InvalidInputsError", msg.str(), i);
      }
    }
  }
  if (issues.empty()) {
    double implied = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      implied +=
          spec.joint.cells[i].p_l * (spec.y1[i].moment(1) - spec.y0[i].moment(1));
    }
    if (std::abs(implied - spec.delta) > kDeltaConsistencyTol) {
      std::ostringstream msg;
      msg << "delta = " << spec.delta << " but outcome laws imply "
          << implied;
      append(issues, "InvalidInputsError", msg.str());
    }
  }
  return issues;
}

std::vector<ValidationIssue> validate(const PilotDataset& data) {
  std::vector<ValidationIssue> issues;
  // Arity is enforced by construction; the arm check is what can fail here.
  for (int arm : {0, 1}) {
    if (data.arm_count(arm) == 0) {
      std::ostringstream msg;
      msg << "treatment arm " << arm << " is empty";
      append(issues, "EmptyArmError", msg.str());
    }
  }
  return issues;
}

void throw_issue(const ValidationIssue& issue) {
  if (issue.code == "ProbabilityMassError") throw ProbabilityMassError(issue.message);
  if (issue.code == "PositivityError") throw PositivityError(issue.message);
  if (issue.code == "EmptyArmError") throw EmptyArmError(issue.message);
  if (issue.code == "AlignmentError") throw AlignmentError(issue.message);
  throw InvalidInputsError(issue.message);
}

namespace {

template <typename T>
void require_valid_impl(const T& value) {
  auto issues = validate(value);
  if (!issues.empty()) throw_issue(issues.front());
}

}  // namespace

void require_valid(const JointDistributionSpec& spec) { require_valid_impl(spec); }
void require_valid(const ScenarioSpec& spec) { require_valid_impl(spec); }
void require_valid(const PilotDataset& data) { require_valid_impl(data); }

}  // namespace msmpower
