#pragma once

#include <cstdint>
#include <vector>

#include "panopt/config.hpp"
#include "panopt/problem.hpp"
#include "panopt/report.hpp"

namespace panopt::bench {

struct LorenzParams {
  double a1 = 10.0;
  double a2 = 14.0;
  double a3 = 8.0 / 3.0;
  /// Integration step of the fourth-order Runge-Kutta discretization.
  double h = 0.1;
};

/// One Runge-Kutta step of the undisturbed vector field.
Vector lorenz_rk4_step(const Vector& x, const LorenzParams& params = {});
/// Jacobian of lorenz_rk4_step.
Matrix lorenz_rk4_jacobian(const Vector& x, const LorenzParams& params = {});
/// Measured output (2 x0, x1 + x2).
Vector lorenz_output(const Vector& x);

/// Horizon estimation problem for the disturbed system
/// x_{t+1} = step(x_t) + w_t, y_t = G(x_t) + v_t with |w| <= 1, |v| <= 1.5:
///
///   minimize sum_{t<N} ||w_t||^2 + ||v_t||^2
///   s.t.     x_{t+1} - step(x_t) - w_t = 0,  t = 0..N-1
///            y_t - G(x_t) - v_t = 0,         t = 0..N
///
/// Decision variable [x_0..N (3 each); w_0..N (3 each); v_0..N (2 each)],
/// dimension 8(N+1); parameter the stacked measurements (2(N+1)); the
/// residuals form F1 with C = {0}, dimension 3N + 2(N+1); bounds on w and v
/// make up the projectable set (states free).
ProblemDefinition make_lorenz_mhe_problem(int horizon, const LorenzParams& params = {});

/// Reference tuning: epsilon 1e-4, delta 1e-5, epsilon0 0.1, c0 200, rho 1.8,
/// L-BFGS memory 15.
SolverConfig mhe_config();

/// Offsets of the decision blocks for a given horizon.
struct MheLayout {
  int horizon;
  [[nodiscard]] Index state_offset(int t) const { return 3 * t; }
  [[nodiscard]] Index noise_offset(int t) const { return 3 * (horizon + 1) + 3 * t; }
  [[nodiscard]] Index output_noise_offset(int t) const {
    return 6 * (horizon + 1) + 2 * t;
  }
  [[nodiscard]] Index decision_dim() const { return 8 * (horizon + 1); }
  [[nodiscard]] Index residual_dim() const { return 3 * horizon + 2 * (horizon + 1); }
};

struct MheTrialResult {
  SolverReport report;
  std::uint64_t seed = 0;
  /// max_t || estimated state_t - true state_t ||.
  double max_state_error = 0.0;
  double final_state_error = 0.0;
  /// Penalty value per outer iteration.
  std::vector<double> penalty_trajectory;
};

struct MheStudyResult {
  int horizon = 0;
  std::vector<MheTrialResult> trials;
};

/// Fixed-seed estimation trials: simulate the plant under uniform noise,
/// build the estimation problem from the measurements and solve it from a
/// zero initial guess. horizon must be one of 50, 100, 150.
MheStudyResult run_mhe(int horizon, int trials, std::uint64_t base_seed = 42,
                       const LorenzParams& params = {});

}  // namespace panopt::bench
