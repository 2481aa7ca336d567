#pragma once

#include <chrono>
#include <optional>

#include "panopt/types.hpp"

namespace panopt {

/// Connective for the penalty-stall test, quantified over the infeasibility
/// measures the problem actually has (the multiplier increment when n1 > 0,
/// the equality-residual norm when n2 > 0).
enum class PenaltyUpdateRule {
  /// Raise c only when every present measure stalled; holding c whenever one
  /// of them improved keeps the inner problems well conditioned.
  IncreaseIfAllStalled,
  /// Raise c as soon as any present measure stalled.
  IncreaseIfAnyStalled,
};

/// Tuning knobs shared by the outer loop and the inner solver.
///
/// Every range below is enforced by validate(); the solvers validate on
/// construction so a bad value never reaches the iteration loops.
struct SolverConfig {
  /// Inner (stationarity) tolerance.
  double epsilon = 1e-4;
  /// Infeasibility tolerance.
  double delta = 1e-4;
  /// Initial inner tolerance; must be >= epsilon. Prefer with_tolerances(),
  /// which applies the max(epsilon, 1e-4) default rule.
  double epsilon0 = 1e-4;
  /// Inner-tolerance decrease factor, in (0, 1).
  double beta = 0.1;
  /// Penalty update factor, > 1.
  double rho = 5.0;
  /// Sufficient-decrease coefficient for infeasibility measures, in (0, 1).
  double theta = 0.25;
  /// Initial penalty.
  double c0 = 10.0;
  /// Initial multiplier guess; zero when absent.
  std::optional<Vector> y0;
  int max_outer_iters = 50;
  int max_inner_iters = 5000;
  /// Optional wall-clock budget for a whole solve.
  std::optional<std::chrono::duration<double>> max_duration;
  /// L-BFGS memory, >= 1.
  int lbfgs_memory = 10;
  /// Step-size safety factor: gamma = alpha_gamma / L, in (0, 1).
  double alpha_gamma = 0.95;
  /// Linesearch coefficient: sigma = sigma_coeff * gamma * (1 - gamma L),
  /// in (0, 0.5).
  double sigma_coeff = 0.49;
  int max_linesearch_halvings = 10;
  /// Cautious-update threshold for L-BFGS pair acceptance, >= 0.
  double cbfgs_epsilon = 1e-10;
  PenaltyUpdateRule penalty_update_rule = PenaltyUpdateRule::IncreaseIfAllStalled;

  /// Config with the given tolerances and epsilon0 = max(epsilon, 1e-4).
  static SolverConfig with_tolerances(double epsilon, double delta);

  /// Throws std::invalid_argument naming the first out-of-range field.
  void validate() const;
};

}  // namespace panopt
