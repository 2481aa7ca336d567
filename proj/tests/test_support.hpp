#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "panopt/config.hpp"
#include "panopt/problem.hpp"
#include "panopt/report.hpp"
#include "panopt/types.hpp"

namespace panopt::testing {

inline Vector random_vector(std::mt19937_64& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// Unconstrained quadratic 1/2 u'Qu + b'u as a problem with no F1/F2.
inline ProblemDefinition make_quadratic_problem(Matrix q, Vector b) {
  ProblemDefinition problem;
  problem.n = b.size();
  problem.n_p = 0;
  problem.cost = [q, b](const Vector& u, const Vector&) {
    return 0.5 * u.dot(q * u) + b.dot(u);
  };
  problem.grad_cost = [q, b](const Vector& u, const Vector&, Vector& g) {
    g = q * u + b;
  };
  return problem;
}

/// Inverse-Hessian product of plain BFGS seeded with gamma_scale * I and the
/// given pairs applied oldest-to-newest; the independent reference for the
/// two-loop recursion.
inline Matrix dense_inverse_hessian(const std::vector<std::pair<Vector, Vector>>& pairs,
                                    double gamma_scale) {
  const Index n = pairs.front().first.size();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix h = gamma_scale * eye;
  for (const auto& [s, y] : pairs) {
    const double rho = 1.0 / y.dot(s);
    const Matrix v = eye - rho * y * s.transpose();
    h = v.transpose() * h * v + rho * s * s.transpose();
  }
  return h;
}

/// The three termination inequalities a Converged report promises.
inline bool converged_report_consistent(const SolverReport& report,
                                        const SolverConfig& config) {
  if (report.exit_status != ExitStatus::Converged) return true;
  return report.last_fpr_norm <= config.epsilon && report.f2_norm <= config.delta &&
         report.delta_y_norm <= report.penalty * config.delta;
}

/// 1/2 u'Au + b'u with A spd, subject to Gu = h; closed-form KKT pair via a
/// dense linear solve, independent of the iterative path.
struct EqualityQp {
  Matrix a;
  Vector b;
  Matrix g;
  Vector h;

  [[nodiscard]] ProblemDefinition problem() const {
    ProblemDefinition p;
    p.n = b.size();
    p.n1 = h.size();
    p.cost = [a = a, b = b](const Vector& u, const Vector&) {
      return 0.5 * u.dot(a * u) + b.dot(u);
    };
    p.grad_cost = [a = a, b = b](const Vector& u, const Vector&, Vector& grad) {
      grad = a * u + b;
    };
    p.f1 = [g = g, h = h](const Vector& u, const Vector&, Vector& out) {
      out = g * u - h;
    };
    p.jf1_t_apply = [g = g](const Vector&, const Vector&, const Vector& w, Vector& out) {
      out = g.transpose() * w;
    };
    p.set_c = ConstraintSet::zero();
    return p;
  }

  /// Solves [A G'; G 0] [u; y] = [-b; h].
  [[nodiscard]] std::pair<Vector, Vector> kkt_solution() const {
    const Index n = b.size(), m = h.size();
    Matrix kkt = Matrix::Zero(n + m, n + m);
    kkt.topLeftCorner(n, n) = a;
    kkt.topRightCorner(n, m) = g.transpose();
    kkt.bottomLeftCorner(m, n) = g;
    Vector rhs(n + m);
    rhs.head(n) = -b;
    rhs.tail(m) = h;
    const Vector sol = kkt.fullPivLu().solve(rhs);
    return {sol.head(n), sol.tail(m)};
  }
};

inline EqualityQp random_equality_qp(std::mt19937_64& rng, Index n, Index m) {
  while (true) {
    Matrix mat(n, n);
    for (Index i = 0; i < n; ++i) mat.row(i) = random_vector(rng, n, -1, 1).transpose();
    EqualityQp qp;
    qp.a = mat.transpose() * mat + Matrix::Identity(n, n);
    qp.b = random_vector(rng, n, -1, 1);
    qp.g = Matrix(m, n);
    for (Index i = 0; i < m; ++i) qp.g.row(i) = random_vector(rng, n, -1, 1).transpose();
    qp.h = random_vector(rng, m, -1, 1);
    if (qp.g.jacobiSvd().singularValues().minCoeff() > 0.2) return qp;
  }
}

}  // namespace panopt::testing
