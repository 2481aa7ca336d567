#pragma once

#include "panopt/types.hpp"

namespace panopt {

/// Limited-memory BFGS ring buffer with cautious pair acceptance.
///
/// Pairs are (s, y) = (iterate difference, fixed-point-residual difference);
/// a pair enters the buffer only when
///
///   <s, y> / ||s||^2  >=  cbfgs_epsilon * grad_norm,
///
/// with <s, y> > 0, so the implicit inverse Hessian stays positive definite
/// on nonconvex problems. apply() runs the standard two-loop recursion with
/// initial scaling <s, y>/<y, y> of the newest accepted pair (4*memory*n
/// multiply-adds). All storage is fixed at construction.
class LbfgsBuffer {
 public:
  LbfgsBuffer(Index n, int memory, double cbfgs_epsilon);

  /// Returns whether the pair was stored; rejection is a normal outcome.
  /// grad_norm is the norm of the fixed-point residual at the pair's origin.
  bool update(const Vector& s, const Vector& y_res, double grad_norm);

  /// out = -H r; with an empty buffer out = -r.
  void apply(const Vector& r, Vector& out);

  /// Drops all pairs; capacity is retained.
  void clear();

  [[nodiscard]] int count() const { return count_; }
  [[nodiscard]] int memory() const { return memory_; }
  [[nodiscard]] double gamma_scale() const { return gamma_scale_; }

 private:
  [[nodiscard]] Index column(int logical) const {
    return (head_ + logical) % memory_;  // logical 0 = oldest
  }

  Index n_;
  int memory_;
  double cbfgs_epsilon_;
  Matrix s_;      // n x memory
  Matrix y_;      // n x memory
  Vector rho_;    // memory
  Vector alpha_;  // memory, two-loop scratch
  Vector q_;      // n, two-loop scratch
  int head_ = 0;
  int count_ = 0;
  double gamma_scale_ = 1.0;
};

}  // namespace panopt
