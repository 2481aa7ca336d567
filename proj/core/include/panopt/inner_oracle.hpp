#pragma once

#include "panopt/problem.hpp"
#include "panopt/types.hpp"

namespace panopt {

/// Smooth inner cost
///
///   psi(u; c, y) = f(u) + (c/2) [ dist_C^2(F1(u) + y/c) + ||F2(u)||^2 ]
///
/// and its gradient
///
///   grad psi(u; c, y) = grad f(u) + c JF1(u)^T s(u) + (c/2) grad ||F2(u)||^2,
///
/// where s(u) = F1(u) + y/c - proj_C(F1(u) + y/c) is the shifted slack.
///
/// The slack is computed once per point and shared between psi, grad_psi and
/// the outer multiplier update; workspace vectors are preallocated at
/// construction so evaluations never allocate.
///
/// Instances carry mutable scratch and are single-threaded; distinct
/// instances over the same ProblemDefinition may run on distinct threads.
class InnerOracle {
 public:
  InnerOracle(const ProblemDefinition& problem, Vector p);

  /// c > 0; invalidates cached slacks.
  void set_penalty(double c);
  /// Length n1; invalidates cached slacks.
  void set_multipliers(const Vector& y);

  [[nodiscard]] double penalty() const { return c_; }
  [[nodiscard]] const Vector& multipliers() const { return y_; }
  [[nodiscard]] const Vector& parameter() const { return p_; }
  [[nodiscard]] const ProblemDefinition& problem() const { return *problem_; }
  [[nodiscard]] Index dim() const { return problem_->n; }

  /// May return a non-finite value when a user oracle does; callers decide
  /// how to react.
  double psi(const Vector& u);
  void grad_psi(const Vector& u, Vector& out);
  double cost(const Vector& u) const { return problem_->cost(u, p_); }

  /// Writes s(u) into slack_out and returns ||s(u)||_inf. Requires n1 > 0.
  /// The multiplier update is y+ = c * s(u), since
  /// y_bar + c (F1(u) - proj_C(F1(u) + y_bar/c)) == c s(u).
  double infeasibility_f1(const Vector& u, Vector& slack_out);

  /// ||F2(u)||_inf; requires n2 > 0.
  double f2_norm_inf(const Vector& u);

 private:
  /// Refreshes f1_val_/slack_ for u unless the cache already holds them.
  void compute_slack(const Vector& u);

  const ProblemDefinition* problem_;
  Vector p_;
  double c_ = 1.0;
  Vector y_;

  Vector f1_val_;      // n1
  Vector shifted_;     // n1: F1(u) + y/c
  Vector proj_c_;      // n1
  Vector slack_;       // n1
  Vector f2_val_;      // n2
  Vector grad_term_;   // n
  Vector slack_point_; // u at which slack_ is current
  bool slack_valid_ = false;
};

}  // namespace panopt
