#include "panopt/alm.hpp"

#include <cmath>
#include <stdexcept>

namespace panopt {

Vector multiplier_update(const Vector& y_bar, double c, const Vector& f1_val,
                         const ConstraintSet& set_c) {
  if (!(c > 0)) throw std::invalid_argument("multiplier_update: c must be positive");
  const Vector shifted = f1_val + y_bar / c;
  return y_bar + c * (f1_val - set_c.project(shifted));
}

bool penalty_decision(std::optional<double> z, std::optional<double> t,
                      double z_prev, double t_prev, double theta, int nu,
                      PenaltyUpdateRule rule) {
  if (nu <= 0) return false;
  const bool z_stalled = z && *z > theta * z_prev;
  const bool t_stalled = t && *t > theta * t_prev;
  if (rule == PenaltyUpdateRule::IncreaseIfAnyStalled) return z_stalled || t_stalled;
  // IncreaseIfAllStalled: every measure the problem has must have stalled.
  bool increase = z.has_value() || t.has_value();
  if (z) increase = increase && z_stalled;
  if (t) increase = increase && t_stalled;
  return increase;
}

AlmSolver::AlmSolver(ProblemDefinition problem, SolverConfig config)
    : problem_(std::move(problem)),
      config_(std::move(config)),
      panoc_(problem_.n, config_) {
  config_.validate();
  const ValidationResult validation = validate_problem(problem_);
  if (!validation.ok())
    throw std::invalid_argument("AlmSolver: invalid problem: " + validation.summary());
  if (config_.y0 && config_.y0->size() != problem_.n1)
    throw std::invalid_argument("AlmSolver: config y0 length does not match n1");

  if (problem_.n1 > 0) {
    y_set_ = problem_.set_y ? *problem_.set_y
                            : default_y_set(*problem_.set_c, problem_.n1);
  }
  y_.resize(problem_.n1);
  y_bar_.resize(problem_.n1);
  y_next_.resize(problem_.n1);
  slack_.resize(problem_.n1);
}

void AlmSolver::reset() {
  warm_u_.reset();
  warm_y_.reset();
}

SolverReport AlmSolver::solve(const Vector& p) {
  return solve(p, std::nullopt, std::nullopt, std::nullopt);
}

SolverReport AlmSolver::solve(const Vector& p, std::optional<Vector> u0,
                              std::optional<Vector> y0, std::optional<double> c0) {
  const auto start = PanocSolver::Clock::now();
  std::optional<PanocSolver::Clock::time_point> deadline;
  if (config_.max_duration)
    deadline = start + std::chrono::duration_cast<PanocSolver::Clock::duration>(
                           *config_.max_duration);

  if (p.size() != problem_.n_p)
    throw std::invalid_argument("AlmSolver: parameter length does not match n_p");

  Vector u;
  if (u0)
    u = std::move(*u0);
  else if (warm_u_)
    u = *warm_u_;
  else
    u = Vector::Zero(problem_.n);
  if (u.size() != problem_.n)
    throw std::invalid_argument("AlmSolver: u0 length does not match n");

  if (y0) {
    if (y0->size() != problem_.n1)
      throw std::invalid_argument("AlmSolver: y0 length does not match n1");
    y_ = *y0;
  } else if (warm_y_) {
    y_ = *warm_y_;
  } else if (config_.y0) {
    y_ = *config_.y0;
  } else {
    y_.setZero();
  }

  double c = c0.value_or(config_.c0);
  if (!(c > 0)) throw std::invalid_argument("AlmSolver: initial penalty must be positive");

  InnerOracle oracle(problem_, p);
  const bool has_f1 = problem_.n1 > 0;
  const bool has_f2 = problem_.n2 > 0;

  double eps_bar = config_.epsilon0;
  double z = 0.0, t = 0.0, z_prev = 0.0, t_prev = 0.0;

  SolverReport report;
  report.exit_status = ExitStatus::MaxOuterIterations;
  report.penalty = c;

  Vector inner_start = u;

  for (int nu = 0; nu < config_.max_outer_iters; ++nu) {
    if (deadline && PanocSolver::Clock::now() > *deadline) {
      report.exit_status = ExitStatus::TimeBudgetExceeded;
      break;
    }

    if (has_f1) {
      y_set_->project_into(y_, y_bar_);
      oracle.set_multipliers(y_bar_);
    }
    oracle.set_penalty(c);

    inner_start = u;
    const InnerResult inner = panoc_.solve(oracle, problem_.set_u, u, eps_bar,
                                           config_.max_inner_iters, deadline);
    report.num_inner_iterations += inner.iterations;
    report.last_fpr_norm = inner.fpr_norm;
    report.num_outer_iterations = nu + 1;

    if (inner.status == ExitStatus::OracleFailure ||
        inner.status == ExitStatus::TimeBudgetExceeded) {
      report.exit_status = inner.status;
      break;
    }

    if (has_f1) {
      oracle.infeasibility_f1(u, slack_);
      y_next_ = c * slack_;  // equals y_bar + c (F1(u) - proj_C(F1(u) + y_bar/c))
      z = (y_next_ - y_bar_).lpNorm<Eigen::Infinity>();
    } else {
      z = 0.0;
    }
    t = has_f2 ? oracle.f2_norm_inf(u) : 0.0;

    if (observer_) {
      observer_({nu, c, eps_bar, z, t, inner.status, inner.iterations,
                 inner.fpr_norm, inner_start, u, y_bar_, y_next_});
    }

    if (z <= c * config_.delta && t <= config_.delta && eps_bar <= config_.epsilon &&
        inner.status == ExitStatus::Converged) {
      report.exit_status = ExitStatus::Converged;
      if (has_f1) y_ = y_next_;
      report.delta_y_norm = z;
      report.f2_norm = t;
      report.penalty = c;
      break;
    }

    if (penalty_decision(has_f1 ? std::optional(z) : std::nullopt,
                         has_f2 ? std::optional(t) : std::nullopt, z_prev, t_prev,
                         config_.theta, nu, config_.penalty_update_rule)) {
      c *= config_.rho;
    }
    eps_bar = std::max(config_.epsilon, config_.beta * eps_bar);

    if (has_f1) y_ = y_next_;
    z_prev = z;
    t_prev = t;
    report.delta_y_norm = z;
    report.f2_norm = t;
    report.penalty = c;
  }

  report.solution = u;
  report.lagrange_multipliers = y_;
  report.cost = problem_.cost(u, p);
  report.solve_time = PanocSolver::Clock::now() - start;

  warm_u_ = u;
  warm_y_ = y_;
  return report;
}

}  // namespace panopt
