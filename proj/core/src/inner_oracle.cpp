#include "panopt/inner_oracle.hpp"

#include <stdexcept>

namespace panopt {

InnerOracle::InnerOracle(const ProblemDefinition& problem, Vector p)
    : problem_(&problem), p_(std::move(p)) {
  if (p_.size() != problem.n_p)
    throw std::invalid_argument("InnerOracle: parameter length does not match n_p");
  y_ = Vector::Zero(problem.n1);
  f1_val_.resize(problem.n1);
  shifted_.resize(problem.n1);
  proj_c_.resize(problem.n1);
  slack_.resize(problem.n1);
  f2_val_.resize(problem.n2);
  grad_term_.resize(problem.n);
  slack_point_.resize(problem.n);
}

void InnerOracle::set_penalty(double c) {
  if (!(c > 0)) throw std::invalid_argument("InnerOracle: penalty must be positive");
  c_ = c;
  slack_valid_ = false;
}

void InnerOracle::set_multipliers(const Vector& y) {
  if (y.size() != problem_->n1)
    throw std::invalid_argument("InnerOracle: multiplier length does not match n1");
  y_ = y;
  slack_valid_ = false;
}

void InnerOracle::compute_slack(const Vector& u) {
  if (slack_valid_ && u == slack_point_) return;
  problem_->f1(u, p_, f1_val_);
  shifted_ = f1_val_ + y_ / c_;
  problem_->set_c->project_into(shifted_, proj_c_);
  slack_ = shifted_ - proj_c_;
  slack_point_ = u;
  slack_valid_ = true;
}

double InnerOracle::psi(const Vector& u) {
  double value = problem_->cost(u, p_);
  if (problem_->n1 > 0) {
    compute_slack(u);
    value += 0.5 * c_ * slack_.squaredNorm();
  }
  if (problem_->n2 > 0) {
    problem_->f2(u, p_, f2_val_);
    value += 0.5 * c_ * f2_val_.squaredNorm();
  }
  return value;
}

void InnerOracle::grad_psi(const Vector& u, Vector& out) {
  problem_->grad_cost(u, p_, out);
  if (problem_->n1 > 0) {
    compute_slack(u);
    problem_->jf1_t_apply(u, p_, slack_, grad_term_);
    out += c_ * grad_term_;
  }
  if (problem_->n2 > 0) {
    problem_->grad_f2_sq(u, p_, grad_term_);
    out += 0.5 * c_ * grad_term_;
  }
}

double InnerOracle::infeasibility_f1(const Vector& u, Vector& slack_out) {
  if (problem_->n1 == 0)
    throw std::logic_error("InnerOracle: infeasibility_f1 needs n1 > 0");
  compute_slack(u);
  slack_out = slack_;
  return slack_.lpNorm<Eigen::Infinity>();
}

double InnerOracle::f2_norm_inf(const Vector& u) {
  if (problem_->n2 == 0) throw std::logic_error("InnerOracle: f2_norm_inf needs n2 > 0");
  problem_->f2(u, p_, f2_val_);
  return f2_val_.lpNorm<Eigen::Infinity>();
}

}  // namespace panopt
