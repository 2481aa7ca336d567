#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "panopt/problem.hpp"
#include "panopt/sets.hpp"
#include "panopt/types.hpp"

namespace panopt {

/// Central finite differences with per-coordinate step step * max(1, |u_i|).
/// Central differences are exact to second order, which keeps the checker
/// ahead of solver tolerances down to 1e-5.
struct FdConfig {
  double step = 1e-6;
};

/// Gradient estimate of a scalar function; throws std::runtime_error when an
/// evaluation comes back non-finite.
Vector fd_gradient(const std::function<double(const Vector&)>& func, const Vector& u,
                   const FdConfig& cfg = {});

struct GridMinimizeResult {
  Vector u_best;
  double f_best;
};

/// Exhaustive minimization over a uniform grid of a bounded rectangle of
/// dimension <= 3 (points_per_dim points per axis, bounds included). Ties
/// resolve to the first grid point in row-major enumeration order.
GridMinimizeResult grid_minimize(const std::function<double(const Vector&)>& func,
                                 const ConstraintSet& box, int points_per_dim);

struct OracleCallCounts {
  long cost = 0;
  long grad_cost = 0;
  long f1 = 0;
  long jf1_t_apply = 0;
  long f2 = 0;
  long grad_f2_sq = 0;
};

/// Wraps every oracle of the problem to count calls; behavior is otherwise
/// identical. Wrapping a wrapped problem counts on both levels.
std::pair<ProblemDefinition, std::shared_ptr<OracleCallCounts>> counting_wrapper(
    const ProblemDefinition& problem);

}  // namespace panopt
