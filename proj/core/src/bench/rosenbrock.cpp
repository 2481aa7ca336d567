#include "panopt/bench/rosenbrock.hpp"

#include <cmath>
#include <limits>

namespace panopt::bench {

namespace {

double rosenbrock_cost(const Vector& u, const Vector& p) {
  double value = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double a = u[i + 1] - u[i] * u[i];
    const double b = p[0] - u[i];
    value += p[1] * a * a + b * b;
  }
  return value;
}

void rosenbrock_grad(const Vector& u, const Vector& p, Vector& g) {
  g.setZero();
  for (int i = 0; i < 4; ++i) {
    const double a = u[i + 1] - u[i] * u[i];
    g[i] += -4.0 * p[1] * u[i] * a - 2.0 * (p[0] - u[i]);
    g[i + 1] += 2.0 * p[1] * a;
  }
}

// Constraint pieces shared by both encodings.
double g1(const Vector& u, const Vector& p) {
  return p[2] * std::sin(u[0]) - std::cos(u[1] + u[2]);
}
double g2(const Vector& u) { return u[2] + u[3] - 0.2; }

void grad_g1(const Vector& u, const Vector& p, Vector& out) {
  out.setZero();
  out[0] = p[2] * std::cos(u[0]);
  out[1] = std::sin(u[1] + u[2]);
  out[2] = out[1];
}

}  // namespace

ProblemDefinition make_rosenbrock_problem(ConstraintEncoding encoding) {
  ProblemDefinition problem;
  problem.n = 5;
  problem.n_p = 3;
  problem.cost = rosenbrock_cost;
  problem.grad_cost = rosenbrock_grad;
  problem.set_u = ConstraintSet::ball2(0.73);

  if (encoding == ConstraintEncoding::Penalty) {
    problem.n2 = 2;
    problem.f2 = [](const Vector& u, const Vector& p, Vector& out) {
      out[0] = g1(u, p);
      out[1] = std::max(g2(u), 0.0);
    };
    problem.grad_f2_sq = [](const Vector& u, const Vector& p, Vector& out) {
      // grad(g1^2 + [g2]_+^2) = 2 g1 grad g1 + 2 [g2]_+ grad g2.
      grad_g1(u, p, out);
      out *= 2.0 * g1(u, p);
      const double hinge = std::max(g2(u), 0.0);
      out[2] += 2.0 * hinge;
      out[3] += 2.0 * hinge;
    };
  } else {
    problem.n1 = 2;
    problem.f1 = [](const Vector& u, const Vector& p, Vector& out) {
      out[0] = g1(u, p);
      out[1] = g2(u);
    };
    problem.jf1_t_apply = [](const Vector& u, const Vector& p, const Vector& w,
                             Vector& out) {
      grad_g1(u, p, out);
      out *= w[0];
      out[2] += w[1];
      out[3] += w[1];
    };
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::pair<Index, ConstraintSet>> segments;
    segments.emplace_back(1, ConstraintSet::zero());
    segments.emplace_back(2, ConstraintSet::rectangle(Vector::Constant(1, -inf),
                                                      Vector::Zero(1)));
    problem.set_c = ConstraintSet::cartesian(std::move(segments));
  }
  return problem;
}

SolverConfig rosenbrock_config() {
  SolverConfig cfg = SolverConfig::with_tolerances(1e-5, 1e-4);
  cfg.epsilon0 = 1e-4;
  cfg.c0 = 1e3;
  cfg.rho = 5.0;
  return cfg;
}

Vector rosenbrock_reference_parameter() {
  Vector p(3);
  p << 1.0, 50.0, 1.5;
  return p;
}

}  // namespace panopt::bench
