#include "panopt/checks.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace panopt {

Vector fd_gradient(const std::function<double(const Vector&)>& func, const Vector& u,
                   const FdConfig& cfg) {
  if (!(cfg.step > 0)) throw std::invalid_argument("fd_gradient: step must be positive");
  Vector grad(u.size());
  Vector point = u;
  for (Index i = 0; i < u.size(); ++i) {
    const double h = cfg.step * std::max(1.0, std::abs(u[i]));
    point[i] = u[i] + h;
    const double fp = func(point);
    point[i] = u[i] - h;
    const double fm = func(point);
    point[i] = u[i];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::runtime_error("fd_gradient: non-finite function value near the base point");
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

GridMinimizeResult grid_minimize(const std::function<double(const Vector&)>& func,
                                 const ConstraintSet& box, int points_per_dim) {
  const auto* rect = std::get_if<detail::Rectangle>(&box.raw());
  if (!rect) throw std::invalid_argument("grid_minimize: box must be a rectangle");
  const Index dim = rect->lower.size();
  if (dim > 3) throw std::invalid_argument("grid_minimize: dimension must be <= 3");
  if (!rect->lower.allFinite() || !rect->upper.allFinite())
    throw std::invalid_argument("grid_minimize: box must be bounded");
  if (points_per_dim < 2)
    throw std::invalid_argument("grid_minimize: points_per_dim must be >= 2");

  Vector point(dim);
  std::vector<int> idx(dim, 0);
  GridMinimizeResult best{Vector(dim), std::numeric_limits<double>::infinity()};

  const auto coordinate = [&](Index d, int k) {
    return rect->lower[d] +
           (rect->upper[d] - rect->lower[d]) * static_cast<double>(k) /
               static_cast<double>(points_per_dim - 1);
  };

  bool done = false;
  while (!done) {
    for (Index d = 0; d < dim; ++d) point[d] = coordinate(d, idx[d]);
    const double value = func(point);
    if (value < best.f_best) {
      best.f_best = value;
      best.u_best = point;
    }
    // Row-major increment: the last coordinate runs fastest.
    Index d = dim - 1;
    while (true) {
      if (++idx[d] < points_per_dim) break;
      idx[d] = 0;
      if (d == 0) {
        done = true;
        break;
      }
      --d;
    }
  }
  return best;
}

std::pair<ProblemDefinition, std::shared_ptr<OracleCallCounts>> counting_wrapper(
    const ProblemDefinition& problem) {
  auto counts = std::make_shared<OracleCallCounts>();
  ProblemDefinition wrapped = problem;
  if (problem.cost)
    wrapped.cost = [counts, fn = problem.cost](const Vector& u, const Vector& p) {
      ++counts->cost;
      return fn(u, p);
    };
  if (problem.grad_cost)
    wrapped.grad_cost = [counts, fn = problem.grad_cost](const Vector& u, const Vector& p,
                                                         Vector& out) {
      ++counts->grad_cost;
      fn(u, p, out);
    };
  if (problem.f1)
    wrapped.f1 = [counts, fn = problem.f1](const Vector& u, const Vector& p, Vector& out) {
      ++counts->f1;
      fn(u, p, out);
    };
  if (problem.jf1_t_apply)
    wrapped.jf1_t_apply = [counts, fn = problem.jf1_t_apply](
                              const Vector& u, const Vector& p, const Vector& w,
                              Vector& out) {
      ++counts->jf1_t_apply;
      fn(u, p, w, out);
    };
  if (problem.f2)
    wrapped.f2 = [counts, fn = problem.f2](const Vector& u, const Vector& p, Vector& out) {
      ++counts->f2;
      fn(u, p, out);
    };
  if (problem.grad_f2_sq)
    wrapped.grad_f2_sq = [counts, fn = problem.grad_f2_sq](const Vector& u, const Vector& p,
                                                           Vector& out) {
      ++counts->grad_f2_sq;
      fn(u, p, out);
    };
  return {std::move(wrapped), counts};
}

}  // namespace panopt
