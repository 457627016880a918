#pragma once

#include <Eigen/Dense>

#include <sstream>

#include "msmpower/estimation.hpp"
#include "msmpower/types.hpp"

// Internal helpers shared by the estimation and simulation translation
// units: dense views of a PilotDataset under a ModelTerms expansion.

namespace msmpower::detail {

inline Eigen::MatrixXd design_matrix(const PilotDataset& data,
                                     const ModelTerms& terms) {
  for (std::size_t q : terms.quadratic) {
    if (q >= data.arity()) {
      std::ostringstream msg;
      msg << "quadratic term index " << q << " out of range for arity "
          << data.arity();
      throw InvalidInputsError(msg.str());
    }
  }
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto p =
      static_cast<Eigen::Index>(terms.parameter_count(data.arity()));
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (std::size_t j = 0; j < data.arity(); ++j) {
      x(i, 1 + static_cast<Eigen::Index>(j)) = data.x(i, j);
    }
    for (std::size_t j = 0; j < terms.quadratic.size(); ++j) {
      const double v = data.x(i, terms.quadratic[j]);
      x(i, 1 + static_cast<Eigen::Index>(data.arity() + j)) = v * v;
    }
  }
  return x;
}

inline Eigen::VectorXd treatment_vector(const PilotDataset& data) {
  Eigen::VectorXd a(static_cast<Eigen::Index>(data.size()));
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = data.a(i);
  return a;
}

inline Eigen::VectorXd outcome_vector(const PilotDataset& data) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!data.has_outcome(i)) {
      std::ostringstream msg;
      msg << "row " << i << " has no outcome";
      throw MissingOutcomeError(msg.str());
    }
    y(i) = data.y(i);
  }
  return y;
}

}  // namespace msmpower::detail
