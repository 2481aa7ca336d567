#pragma once

#include <chrono>
#include <functional>
#include <optional>

#include "panopt/config.hpp"
#include "panopt/inner_oracle.hpp"
#include "panopt/lbfgs.hpp"
#include "panopt/sets.hpp"
#include "panopt/types.hpp"

namespace panopt {

/// Result of one inner solve.
struct InnerResult {
  ExitStatus status = ExitStatus::MaxInnerIterations;
  int iterations = 0;
  /// || r/gamma + grad psi(u_half) - grad psi(u) ||_inf at exit.
  double fpr_norm = 0.0;
  double final_gamma = 0.0;
  double final_lipschitz = 0.0;
};

/// Per-iteration diagnostics emitted to the observer after each accepted step.
struct PanocIterationInfo {
  int iteration;
  double lipschitz;
  double gamma;
  double sigma;
  /// Envelope value at the iterate the step started from.
  double phi_before;
  /// Envelope value at the accepted iterate.
  double phi_after;
  /// ||r/gamma||^2 entering the decrease bound.
  double residual_sq;
  double fpr_norm;
  double tau;
  int linesearch_halvings;
  int lipschitz_doublings;
};

/// Inner solver: projected-gradient steps averaged with L-BFGS directions
/// under a forward-backward-envelope decrease test.
///
/// Per iteration: form the projected-gradient point and the fixed-point
/// residual, stop once the stationarity certificate beats the tolerance,
/// double the Lipschitz estimate while the quadratic upper bound fails
/// (halving gamma and sigma and emptying the L-BFGS buffer), then pick the
/// largest tau in {1, 1/2, 1/4, ...} whose averaged iterate decreases the
/// envelope by sigma * ||r/gamma||^2, falling back to the projected-gradient
/// point after max_linesearch_halvings failures.
///
/// Instances hold preallocated workspace; one instance per thread, reusable
/// across solves (warm starts pass through `u`).
class PanocSolver {
 public:
  PanocSolver(Index n, const SolverConfig& config);

  using Clock = std::chrono::steady_clock;

  /// Solves min psi over set_u starting from u; on return u holds the final
  /// iterate, which is always a point of set_u. On MaxInnerIterations the
  /// iterate with the smallest stationarity measure seen is returned.
  InnerResult solve(InnerOracle& oracle, const ConstraintSet& set_u, Vector& u,
                    double epsilon_bar, int max_iters,
                    std::optional<Clock::time_point> deadline = {});

  void set_observer(std::function<void(const PanocIterationInfo&)> observer) {
    observer_ = std::move(observer);
  }

 private:
  Index n_;
  int lbfgs_memory_;
  double alpha_gamma_;
  double sigma_coeff_;
  int max_halvings_;
  LbfgsBuffer lbfgs_;
  std::function<void(const PanocIterationInfo&)> observer_;

  Vector grad_u_, u_half_, r_, grad_half_, d_, cand_, grad_cand_, cand_half_,
      r_cand_, step_, pair_y_, best_u_;
};

/// T_gamma(u) = proj_U(u - gamma * grad psi(u)).
Vector forward_backward(InnerOracle& oracle, const ConstraintSet& set_u,
                        const Vector& u, double gamma);

/// Envelope value
///   phi_gamma(u) = psi(u) - (gamma/2)||grad psi(u)||^2
///                + (1/2gamma) dist_U^2(u - gamma * grad psi(u)),
/// computed at the cost of one projected-gradient step.
double fbe(InnerOracle& oracle, const ConstraintSet& set_u, const Vector& u,
           double gamma);

/// Secant estimate ||grad psi(u0 + h) - grad psi(u0)|| / ||h|| with
/// h_i = 1e-6 * max(1, |u0_i|), floored at 1e-12. Returns NaN when a
/// gradient came back non-finite.
double estimate_lipschitz(InnerOracle& oracle, const Vector& u0);

}  // namespace panopt
