#pragma once

#include <stdexcept>
#include <string>

namespace msmpower {

// Error taxonomy. Input errors describe bad user inputs (specs, data files,
// argument values) and map to CLI exit code 2; runtime errors arise while
// fitting or simulating and map to exit code 3.
enum class ErrorKind { input, runtime };

class Error : public std::runtime_error {
 public:
  Error(std::string code, ErrorKind kind, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), kind_(kind) {}

  const std::string& code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  std::string code_;
  ErrorKind kind_;
};

#define MSMPOWER_DEFINE_ERROR(NAME, KIND)                      \
  class NAME : public Error {                                  \
   public:                                                     \
    explicit NAME(const std::string& message)                  \
        : Error(#NAME, ErrorKind::KIND, message) {}            \
  }

MSMPOWER_DEFINE_ERROR(ProbabilityMassError, input);
MSMPOWER_DEFINE_ERROR(PositivityError, input);
MSMPOWER_DEFINE_ERROR(EmptyArmError, input);
MSMPOWER_DEFINE_ERROR(AlignmentError, input);
MSMPOWER_DEFINE_ERROR(MissingOutcomeError, input);
MSMPOWER_DEFINE_ERROR(InvalidInputsError, input);
MSMPOWER_DEFINE_ERROR(DomainError, input);
MSMPOWER_DEFINE_ERROR(UnachievableTargetError, input);
MSMPOWER_DEFINE_ERROR(SchemaError, input);
MSMPOWER_DEFINE_ERROR(ParseError, input);
MSMPOWER_DEFINE_ERROR(MissingColumnError, input);

MSMPOWER_DEFINE_ERROR(SeparationError, runtime);
MSMPOWER_DEFINE_ERROR(RankDeficiencyError, runtime);
MSMPOWER_DEFINE_ERROR(NonConvergenceError, runtime);
MSMPOWER_DEFINE_ERROR(SingularBreadError, runtime);
MSMPOWER_DEFINE_ERROR(DegenerateVarianceError, runtime);
MSMPOWER_DEFINE_ERROR(ResampleBudgetExceeded, runtime);
MSMPOWER_DEFINE_ERROR(ReplicationFailureError, runtime);

#undef MSMPOWER_DEFINE_ERROR

}  // namespace msmpower
