#pragma once

#include <chrono>
#include <limits>

#include "panopt/types.hpp"

namespace panopt {

/// Result of a full outer-loop solve.
///
/// On Converged exits, last_fpr_norm <= epsilon, f2_norm <= delta and
/// delta_y_norm <= penalty * delta hold by construction of the termination
/// test.
struct SolverReport {
  ExitStatus exit_status = ExitStatus::MaxOuterIterations;
  int num_outer_iterations = 0;
  /// Total inner iterations across all outer steps.
  int num_inner_iterations = 0;
  /// Infinity norm of the inner stationarity measure at exit.
  double last_fpr_norm = std::numeric_limits<double>::infinity();
  /// Final multiplier increment norm z.
  double delta_y_norm = 0.0;
  /// Final equality-residual norm t.
  double f2_norm = 0.0;
  /// Final penalty parameter.
  double penalty = 0.0;
  /// Cost at the returned solution.
  double cost = std::numeric_limits<double>::quiet_NaN();
  Vector solution;
  Vector lagrange_multipliers;
  std::chrono::duration<double> solve_time{0};
};

}  // namespace panopt
