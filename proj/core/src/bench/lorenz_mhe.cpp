#include "panopt/bench/lorenz_mhe.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "panopt/alm.hpp"

namespace panopt::bench {

namespace {

using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

Vector3d field(const Vector3d& x, const LorenzParams& prm) {
  return {prm.a1 * (x[1] - x[0]), x[0] * (prm.a2 - x[2]) - x[1],
          x[0] * x[1] - prm.a3 * x[2]};
}

Matrix3d field_jacobian(const Vector3d& x, const LorenzParams& prm) {
  Matrix3d j;
  j << -prm.a1, prm.a1, 0.0,
       prm.a2 - x[2], -1.0, -x[0],
       x[1], x[0], -prm.a3;
  return j;
}

Vector3d rk4(const Vector3d& x, const LorenzParams& prm) {
  const double h = prm.h;
  const Vector3d k1 = field(x, prm);
  const Vector3d k2 = field(x + 0.5 * h * k1, prm);
  const Vector3d k3 = field(x + 0.5 * h * k2, prm);
  const Vector3d k4 = field(x + h * k3, prm);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Matrix3d rk4_jacobian(const Vector3d& x, const LorenzParams& prm) {
  const double h = prm.h;
  const Matrix3d eye = Matrix3d::Identity();
  const Vector3d k1 = field(x, prm);
  const Matrix3d j1 = field_jacobian(x, prm);
  const Vector3d x2 = x + 0.5 * h * k1;
  const Matrix3d j2 = field_jacobian(x2, prm) * (eye + 0.5 * h * j1);
  const Vector3d k2 = field(x2, prm);
  const Vector3d x3 = x + 0.5 * h * k2;
  const Matrix3d j3 = field_jacobian(x3, prm) * (eye + 0.5 * h * j2);
  const Vector3d k3 = field(x3, prm);
  const Vector3d x4 = x + h * k3;
  const Matrix3d j4 = field_jacobian(x4, prm) * (eye + h * j3);
  return eye + (h / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
}

Vector2d output(const Vector3d& x) { return {2.0 * x[0], x[1] + x[2]}; }

}  // namespace

Vector lorenz_rk4_step(const Vector& x, const LorenzParams& params) {
  return rk4(Vector3d(x), params);
}

Matrix lorenz_rk4_jacobian(const Vector& x, const LorenzParams& params) {
  return rk4_jacobian(Vector3d(x), params);
}

Vector lorenz_output(const Vector& x) { return output(Vector3d(x)); }

ProblemDefinition make_lorenz_mhe_problem(int horizon, const LorenzParams& params) {
  if (horizon < 1) throw std::invalid_argument("make_lorenz_mhe_problem: horizon must be >= 1");
  const MheLayout lay{horizon};
  const int N = horizon;

  ProblemDefinition problem;
  problem.n = lay.decision_dim();
  problem.n_p = 2 * (N + 1);
  problem.n1 = lay.residual_dim();

  problem.cost = [lay, N](const Vector& u, const Vector&) {
    double value = 0.0;
    for (int t = 0; t < N; ++t) {
      value += u.segment<3>(lay.noise_offset(t)).squaredNorm();
      value += u.segment<2>(lay.output_noise_offset(t)).squaredNorm();
    }
    return value;
  };
  problem.grad_cost = [lay, N](const Vector& u, const Vector&, Vector& g) {
    g.setZero();
    for (int t = 0; t < N; ++t) {
      g.segment<3>(lay.noise_offset(t)) = 2.0 * u.segment<3>(lay.noise_offset(t));
      g.segment<2>(lay.output_noise_offset(t)) =
          2.0 * u.segment<2>(lay.output_noise_offset(t));
    }
  };

  problem.f1 = [lay, N, params](const Vector& u, const Vector& p, Vector& out) {
    for (int t = 0; t < N; ++t) {
      const Vector3d x_t = u.segment<3>(lay.state_offset(t));
      out.segment<3>(3 * t) = u.segment<3>(lay.state_offset(t + 1)) - rk4(x_t, params) -
                              u.segment<3>(lay.noise_offset(t));
    }
    for (int t = 0; t <= N; ++t) {
      const Vector3d x_t = u.segment<3>(lay.state_offset(t));
      out.segment<2>(3 * N + 2 * t) = p.segment<2>(2 * t) - output(x_t) -
                                      u.segment<2>(lay.output_noise_offset(t));
    }
  };

  problem.jf1_t_apply = [lay, N, params](const Vector& u, const Vector&, const Vector& w,
                                         Vector& g) {
    g.setZero();
    for (int t = 0; t < N; ++t) {
      const Vector3d mu = w.segment<3>(3 * t);
      const Vector3d x_t = u.segment<3>(lay.state_offset(t));
      g.segment<3>(lay.state_offset(t + 1)) += mu;
      g.segment<3>(lay.state_offset(t)) -= rk4_jacobian(x_t, params).transpose() * mu;
      g.segment<3>(lay.noise_offset(t)) -= mu;
    }
    for (int t = 0; t <= N; ++t) {
      const Vector2d nu = w.segment<2>(3 * N + 2 * t);
      g[lay.state_offset(t) + 0] -= 2.0 * nu[0];
      g[lay.state_offset(t) + 1] -= nu[1];
      g[lay.state_offset(t) + 2] -= nu[1];
      g.segment<2>(lay.output_noise_offset(t)) -= nu;
    }
  };

  problem.set_c = ConstraintSet::zero();

  const double inf = std::numeric_limits<double>::infinity();
  Vector lower = Vector::Constant(lay.decision_dim(), -inf);
  Vector upper = Vector::Constant(lay.decision_dim(), inf);
  for (int t = 0; t <= N; ++t) {
    lower.segment<3>(lay.noise_offset(t)).setConstant(-1.0);
    upper.segment<3>(lay.noise_offset(t)).setConstant(1.0);
    lower.segment<2>(lay.output_noise_offset(t)).setConstant(-1.5);
    upper.segment<2>(lay.output_noise_offset(t)).setConstant(1.5);
  }
  problem.set_u = ConstraintSet::rectangle(std::move(lower), std::move(upper));
  return problem;
}

SolverConfig mhe_config() {
  SolverConfig cfg = SolverConfig::with_tolerances(1e-4, 1e-5);
  cfg.epsilon0 = 0.1;
  cfg.c0 = 200.0;
  cfg.rho = 1.8;
  cfg.lbfgs_memory = 15;
  return cfg;
}

MheStudyResult run_mhe(int horizon, int trials, std::uint64_t base_seed,
                       const LorenzParams& params) {
  if (horizon != 50 && horizon != 100 && horizon != 150)
    throw std::invalid_argument("run_mhe: horizon must be 50, 100 or 150");
  if (trials < 1) throw std::invalid_argument("run_mhe: trials must be >= 1");

  const int N = horizon;
  const MheLayout lay{N};
  MheStudyResult study;
  study.horizon = N;
  study.trials.reserve(trials);

  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(trial);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u_state(-5.0, 5.0);
    std::uniform_real_distribution<double> u_w(-1.0, 1.0);
    std::uniform_real_distribution<double> u_v(-1.5, 1.5);

    Matrix truth(3, N + 1);
    truth(0, 0) = u_state(rng);
    truth(1, 0) = u_state(rng);
    truth(2, 0) = u_state(rng);
    for (int t = 0; t < N; ++t) {
      const Vector3d w{u_w(rng), u_w(rng), u_w(rng)};
      truth.col(t + 1) = rk4(Vector3d(truth.col(t)), params) + w;
    }
    Vector measurements(2 * (N + 1));
    for (int t = 0; t <= N; ++t) {
      const Vector2d v{u_v(rng), u_v(rng)};
      measurements.segment<2>(2 * t) = output(Vector3d(truth.col(t))) + v;
    }

    AlmSolver solver(make_lorenz_mhe_problem(N, params), mhe_config());
    MheTrialResult trial_result;
    trial_result.seed = seed;
    solver.set_observer([&](const OuterIterationInfo& info) {
      trial_result.penalty_trajectory.push_back(info.c);
    });
    trial_result.report = solver.solve(measurements, Vector::Zero(lay.decision_dim()));

    double max_err = 0.0, final_err = 0.0;
    for (int t = 0; t <= N; ++t) {
      const double err =
          (trial_result.report.solution.segment<3>(lay.state_offset(t)) - truth.col(t))
              .norm();
      max_err = std::max(max_err, err);
      if (t == N) final_err = err;
    }
    trial_result.max_state_error = max_err;
    trial_result.final_state_error = final_err;
    study.trials.push_back(std::move(trial_result));
  }
  return study;
}

}  // namespace panopt::bench
