#include "panopt/lbfgs.hpp"

#include <stdexcept>

namespace panopt {

LbfgsBuffer::LbfgsBuffer(Index n, int memory, double cbfgs_epsilon)
    : n_(n), memory_(memory), cbfgs_epsilon_(cbfgs_epsilon) {
  if (n < 1) throw std::invalid_argument("LbfgsBuffer: n must be >= 1");
  if (memory < 1) throw std::invalid_argument("LbfgsBuffer: memory must be >= 1");
  if (!(cbfgs_epsilon >= 0))
    throw std::invalid_argument("LbfgsBuffer: cbfgs_epsilon must be >= 0");
  s_.resize(n, memory);
  y_.resize(n, memory);
  rho_.resize(memory);
  alpha_.resize(memory);
  q_.resize(n);
}

bool LbfgsBuffer::update(const Vector& s, const Vector& y_res, double grad_norm) {
  if (s.size() != n_ || y_res.size() != n_)
    throw std::invalid_argument("LbfgsBuffer: pair length does not match n");
  const double sy = s.dot(y_res);
  const double ss = s.squaredNorm();
  if (!(sy > 0) || !(ss > 0)) return false;
  if (sy / ss < cbfgs_epsilon_ * grad_norm) return false;

  Index col;
  if (count_ == memory_) {
    col = column(0);
    head_ = (head_ + 1) % memory_;
  } else {
    col = column(count_);
    ++count_;
  }
  s_.col(col) = s;
  y_.col(col) = y_res;
  rho_[col] = 1.0 / sy;
  gamma_scale_ = sy / y_res.squaredNorm();
  return true;
}

void LbfgsBuffer::apply(const Vector& r, Vector& out) {
  if (r.size() != n_)
    throw std::invalid_argument("LbfgsBuffer: vector length does not match n");
  if (count_ == 0) {
    out = -r;
    return;
  }
  q_ = r;
  for (int j = count_ - 1; j >= 0; --j) {
    const Index col = column(j);
    alpha_[col] = rho_[col] * s_.col(col).dot(q_);
    q_ -= alpha_[col] * y_.col(col);
  }
  q_ *= gamma_scale_;
  for (int j = 0; j < count_; ++j) {
    const Index col = column(j);
    const double beta = rho_[col] * y_.col(col).dot(q_);
    q_ += (alpha_[col] - beta) * s_.col(col);
  }
  out = -q_;
}

void LbfgsBuffer::clear() { count_ = 0; head_ = 0; }

}  // namespace panopt
