#pragma once

#include "panopt/bench/single_shooting.hpp"
#include "panopt/config.hpp"
#include "panopt/problem.hpp"

namespace panopt::bench {

/// Constrained Rosenbrock chain in five variables with parameter
/// p = (p0, p1, p2):
///
///   minimize sum_{i=0..3} p1 (u[i+1] - u[i]^2)^2 + (p0 - u[i])^2
///   over ||u|| <= 0.73
///   s.t.  p2 sin(u0) = cos(u1 + u2)   and   u2 + u3 <= 0.2.
///
/// Penalty encoding: F2 = (p2 sin u0 - cos(u1+u2), [u2+u3-0.2]_+).
/// Multiplier encoding: F1 = (p2 sin u0 - cos(u1+u2), u2+u3-0.2) with
/// C = {0} x (-inf, 0].
ProblemDefinition make_rosenbrock_problem(ConstraintEncoding encoding);

/// Reference tuning: epsilon 1e-5, delta 1e-4, epsilon0 1e-4, c0 1e3, rho 5.
SolverConfig rosenbrock_config();

/// Reference parameter (1, 50, 1.5).
Vector rosenbrock_reference_parameter();

}  // namespace panopt::bench
