#pragma once

#include <string_view>

#include <Eigen/Core>

namespace panopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Outcome of a solver run (outer loop, or a single inner solve).
enum class ExitStatus {
  Converged,
  MaxOuterIterations,
  MaxInnerIterations,
  TimeBudgetExceeded,
  OracleFailure,
};

constexpr std::string_view to_string(ExitStatus status) {
  switch (status) {
    case ExitStatus::Converged: return "Converged";
    case ExitStatus::MaxOuterIterations: return "MaxOuterIterations";
    case ExitStatus::MaxInnerIterations: return "MaxInnerIterations";
    case ExitStatus::TimeBudgetExceeded: return "TimeBudgetExceeded";
    case ExitStatus::OracleFailure: return "OracleFailure";
  }
  return "Unknown";
}

}  // namespace panopt
