#pragma once

#include <functional>
#include <optional>

#include "panopt/config.hpp"
#include "panopt/inner_oracle.hpp"
#include "panopt/panoc.hpp"
#include "panopt/problem.hpp"
#include "panopt/report.hpp"
#include "panopt/sets.hpp"

namespace panopt {

/// y+ = y_bar + c * (f1_val - proj_C(f1_val + y_bar / c)).
Vector multiplier_update(const Vector& y_bar, double c, const Vector& f1_val,
                         const ConstraintSet& set_c);

/// Whether the penalty should be raised given the infeasibility measures of
/// this and the previous outer iteration. Measures the problem does not have
/// (z when n1 == 0, t when n2 == 0) are passed as absent and drop out of the
/// test, so the pure-penalty and pure-multiplier special cases keep their
/// textbook updates. Never raises on the first iteration (nu == 0).
bool penalty_decision(std::optional<double> z, std::optional<double> t,
                      double z_prev, double t_prev, double theta, int nu,
                      PenaltyUpdateRule rule);

/// Snapshot of one outer iteration, emitted after the multiplier update.
struct OuterIterationInfo {
  int nu;
  double c;
  double eps_bar;
  double z;
  double t;
  ExitStatus inner_status;
  int inner_iterations;
  double inner_fpr;
  /// Warm-start point handed to the inner solver.
  const Vector& inner_start;
  /// Inner solution u^{nu+1}.
  const Vector& u;
  /// Projected multiplier the inner problem was built with.
  const Vector& y_bar;
  /// Updated multiplier y^{nu+1}.
  const Vector& y_next;
};

/// Outer loop: project the multipliers onto Y, solve the inner problem to the
/// running tolerance warm-started from the previous iterate, update the
/// multipliers, then either stop (z <= c delta, t <= delta, eps_bar <= eps),
/// raise the penalty when the infeasibility measures stalled, and tighten the
/// inner tolerance (eps_bar <- max(eps, beta * eps_bar), starting from
/// epsilon0).
///
/// A solver retains (u, y) from its last run, so parameter-only re-solves are
/// warm-started; the penalty restarts at c0 on every solve unless overridden.
/// Instances are single-threaded during a solve but may move between threads
/// between solves.
class AlmSolver {
 public:
  /// Validates the configuration and the problem (throws
  /// std::invalid_argument listing the issues found).
  AlmSolver(ProblemDefinition problem, SolverConfig config);

  /// Warm-started solve: starts from the previous solution and multipliers
  /// when available, otherwise from zeros.
  SolverReport solve(const Vector& p);
  /// Explicit starts override warm state; absent fields fall back to it.
  SolverReport solve(const Vector& p, std::optional<Vector> u0,
                     std::optional<Vector> y0 = std::nullopt,
                     std::optional<double> c0 = std::nullopt);

  /// Drops retained warm-start state.
  void reset();

  void set_observer(std::function<void(const OuterIterationInfo&)> observer) {
    observer_ = std::move(observer);
  }
  /// Forwarded to the inner solver.
  void set_inner_observer(std::function<void(const PanocIterationInfo&)> observer) {
    panoc_.set_observer(std::move(observer));
  }

  [[nodiscard]] const ProblemDefinition& problem() const { return problem_; }
  [[nodiscard]] const SolverConfig& config() const { return config_; }
  /// Multiplier set in use (set_y, or the structural default).
  [[nodiscard]] const std::optional<ConstraintSet>& y_set() const { return y_set_; }

 private:
  ProblemDefinition problem_;
  SolverConfig config_;
  std::optional<ConstraintSet> y_set_;
  PanocSolver panoc_;
  std::function<void(const OuterIterationInfo&)> observer_;

  std::optional<Vector> warm_u_;
  std::optional<Vector> warm_y_;

  Vector y_, y_bar_, y_next_, slack_;
};

}  // namespace panopt
