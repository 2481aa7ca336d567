#pragma once

#include "panopt/types.hpp"

namespace panopt::bench {

/// How a stage constraint couples back into the problem.
enum class ConstraintEncoding { Penalty, Alm };

/// State elimination for optimal control: the decision variable is the
/// stacked input sequence and states are recovered by rolling the dynamics
/// forward. Gradients of any stage-separable function of the trajectory come
/// from one reverse (adjoint) sweep.
///
/// Model requirements:
///   Index nx() const, Index nu() const;
///   void step(const Vector& x, const Vector& u, Vector& x_next) const;
///   void step_jacobians(const Vector& x, const Vector& u,
///                       Matrix& a, Matrix& b) const;   // a = d step/dx, b = d step/du
template <class Model>
class SingleShooting {
 public:
  SingleShooting(Model model, int horizon) : model_(std::move(model)), horizon_(horizon) {
    x_scratch_.resize(model_.nx());
    u_scratch_.resize(model_.nu());
    a_.resize(model_.nx(), model_.nx());
    b_.resize(model_.nx(), model_.nu());
    lambda_.resize(model_.nx());
    lambda_next_.resize(model_.nx());
  }

  [[nodiscard]] int horizon() const { return horizon_; }
  [[nodiscard]] Index state_dim() const { return model_.nx(); }
  [[nodiscard]] Index input_dim() const { return model_.nu() * horizon_; }
  [[nodiscard]] const Model& model() const { return model_; }

  /// states gets nx columns 0..N with states.col(0) = x0.
  void rollout(const Vector& u_seq, const Vector& x0, Matrix& states) const {
    const Index nx = model_.nx(), nu = model_.nu();
    states.resize(nx, horizon_ + 1);
    states.col(0) = x0;
    for (int t = 0; t < horizon_; ++t) {
      x_scratch_ = states.col(t);
      u_scratch_ = u_seq.segment(t * nu, nu);
      model_.step(x_scratch_, u_scratch_, lambda_);  // lambda_ reused as x_next scratch
      states.col(t + 1) = lambda_;
    }
  }

  /// grad = d/du of sum_t <qx.col(t), x_t(u)> for the rolled-out states:
  ///   lambda_N = qx.col(N),
  ///   grad block t = B_t^T lambda_{t+1},
  ///   lambda_t = A_t^T lambda_{t+1} + qx.col(t).
  /// Input-side cost terms are the caller's to add on top.
  void adjoint_gradient(const Vector& u_seq, const Matrix& states, const Matrix& qx,
                        Vector& grad) const {
    const Index nu = model_.nu();
    grad.resize(input_dim());
    lambda_next_ = qx.col(horizon_);
    for (int t = horizon_ - 1; t >= 0; --t) {
      x_scratch_ = states.col(t);
      u_scratch_ = u_seq.segment(t * nu, nu);
      model_.step_jacobians(x_scratch_, u_scratch_, a_, b_);
      grad.segment(t * nu, nu).noalias() = b_.transpose() * lambda_next_;
      lambda_.noalias() = a_.transpose() * lambda_next_;
      lambda_ += qx.col(t);
      lambda_next_.swap(lambda_);
    }
  }

 private:
  Model model_;
  int horizon_;
  mutable Vector x_scratch_, u_scratch_, lambda_, lambda_next_;
  mutable Matrix a_, b_;
};

}  // namespace panopt::bench
