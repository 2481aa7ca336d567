#pragma once

#include <vector>

#include "panopt/bench/single_shooting.hpp"
#include "panopt/config.hpp"
#include "panopt/problem.hpp"
#include "panopt/report.hpp"

namespace panopt::bench {

/// Kinematic bicycle with first-order velocity dynamics,
/// state x = (px, py, heading, v), input u = (accel, steer):
///
///   px'  = v cos(heading)
///   py'  = v sin(heading)
///   heading' = (v / length) tan(steer)
///   v'   = alpha (accel - v)
///
/// discretized by one explicit Euler step of ts seconds.
struct BicycleParams {
  double alpha = 0.25;
  double length = 0.5;
  double ts = 0.05;
  int horizon = 100;
  double accel_min = -1.0;
  double accel_max = 2.0;
  double steer_max = 0.25;
  double obstacle_x = -3.0;
  double obstacle_y = 0.2;
  double obstacle_radius = 0.65;
  /// Quadratic weights on (px, py, heading, v) per stage and at the horizon
  /// end, plus input-rate weights on (accel, steer).
  double stage_weights[4] = {18.0, 18.0, 2.0, 5.0};
  double terminal_weights[4] = {1500.0, 1500.0, 500.0, 10.0};
  double rate_weights[2] = {100.0, 30.0};
};

struct BicycleModel {
  BicycleParams params;
  [[nodiscard]] Index nx() const { return 4; }
  [[nodiscard]] Index nu() const { return 2; }
  void step(const Vector& x, const Vector& u, Vector& x_next) const;
  void step_jacobians(const Vector& x, const Vector& u, Matrix& a, Matrix& b) const;
};

/// One plant step (plant and prediction model coincide).
Vector bicycle_step(const Vector& x, const Vector& u, const BicycleParams& params = {});

/// Regulation problem to the origin over `horizon` steps with the states
/// eliminated, decision variable the stacked input sequence (dimension
/// 2 * horizon) and parameter p = [x0 (4); previous applied input (2)].
/// The previous input anchors the first input-rate penalty.
///
/// The keep-out disc enters once per predicted stage t = 1..horizon, as
/// F2_t = [r^2 - (px_t - ox)^2 - (py_t - oy)^2]_+ under the penalty encoding
/// or as F1_t = r^2 - ... with C = (-inf, 0]^horizon under the multiplier
/// encoding.
///
/// Each returned instance owns its rollout workspace: share one instance per
/// thread only.
ProblemDefinition make_bicycle_nmpc_problem(ConstraintEncoding encoding,
                                            const BicycleParams& params = {});

/// Reference tuning: epsilon 1e-4, delta 1e-3, epsilon0 1e-4, rho 5, c0 500,
/// L-BFGS memory 20.
SolverConfig nmpc_config();

struct NmpcClosedLoopResult {
  /// Plant states, one column per time, sim_steps + 1 columns.
  Matrix states;
  /// Applied inputs, one column per step.
  Matrix inputs;
  std::vector<SolverReport> reports;
  /// min over all plant states of (px - ox)^2 + (py - oy)^2.
  double min_obstacle_sq_distance = 0.0;
};

/// Receding-horizon run from x0 = (-5, 0, 0, 0): solve, apply the first
/// input, step the plant, warm-start the next solve. Solver failures are
/// recorded in the report list and the loop continues.
NmpcClosedLoopResult run_nmpc_closed_loop(ConstraintEncoding encoding, int sim_steps,
                                          const BicycleParams& params = {});

}  // namespace panopt::bench
