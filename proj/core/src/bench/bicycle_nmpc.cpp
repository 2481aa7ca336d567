#include "panopt/bench/bicycle_nmpc.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "panopt/alm.hpp"

namespace panopt::bench {

void BicycleModel::step(const Vector& x, const Vector& u, Vector& x_next) const {
  const double heading = x[2], v = x[3];
  x_next.resize(4);
  x_next[0] = x[0] + params.ts * v * std::cos(heading);
  x_next[1] = x[1] + params.ts * v * std::sin(heading);
  x_next[2] = x[2] + params.ts * (v / params.length) * std::tan(u[1]);
  x_next[3] = x[3] + params.ts * params.alpha * (u[0] - v);
}

void BicycleModel::step_jacobians(const Vector& x, const Vector& u, Matrix& a,
                                  Matrix& b) const {
  const double heading = x[2], v = x[3];
  const double ts = params.ts;
  const double cos_h = std::cos(heading), sin_h = std::sin(heading);
  const double cos_s = std::cos(u[1]);
  a.setIdentity(4, 4);
  a(0, 2) = -ts * v * sin_h;
  a(0, 3) = ts * cos_h;
  a(1, 2) = ts * v * cos_h;
  a(1, 3) = ts * sin_h;
  a(2, 3) = ts * std::tan(u[1]) / params.length;
  a(3, 3) = 1.0 - ts * params.alpha;
  b.setZero(4, 2);
  b(2, 1) = ts * v / (params.length * cos_s * cos_s);
  b(3, 0) = ts * params.alpha;
}

Vector bicycle_step(const Vector& x, const Vector& u, const BicycleParams& params) {
  Vector out(4);
  BicycleModel{params}.step(x, u, out);
  return out;
}

namespace {

struct NmpcWorkspace {
  explicit NmpcWorkspace(const BicycleParams& params)
      : shooting(BicycleModel{params}, params.horizon) {
    const int n_states = params.horizon + 1;
    states.resize(4, n_states);
    qx.resize(4, n_states);
    last_u.resize(2 * params.horizon);
    last_p.resize(6);
    grad_scratch.resize(2 * params.horizon);
  }

  void ensure_rollout(const Vector& u_seq, const Vector& p) {
    if (valid && u_seq == last_u && p == last_p) return;
    shooting.rollout(u_seq, p.head(4), states);
    last_u = u_seq;
    last_p = p;
    valid = true;
  }

  SingleShooting<BicycleModel> shooting;
  Matrix states;
  Matrix qx;
  Vector last_u, last_p, grad_scratch;
  bool valid = false;
};

double stage_obstacle_value(const Matrix& states, int t, const BicycleParams& prm) {
  const double dx = states(0, t) - prm.obstacle_x;
  const double dy = states(1, t) - prm.obstacle_y;
  return prm.obstacle_radius * prm.obstacle_radius - dx * dx - dy * dy;
}

void add_stage_obstacle_seed(Matrix& qx, const Matrix& states, int t, double weight,
                             const BicycleParams& prm) {
  qx(0, t) += weight * (-2.0 * (states(0, t) - prm.obstacle_x));
  qx(1, t) += weight * (-2.0 * (states(1, t) - prm.obstacle_y));
}

}  // namespace

ProblemDefinition make_bicycle_nmpc_problem(ConstraintEncoding encoding,
                                            const BicycleParams& params) {
  const int N = params.horizon;
  auto ws = std::make_shared<NmpcWorkspace>(params);

  ProblemDefinition problem;
  problem.n = 2 * N;
  problem.n_p = 6;

  problem.cost = [ws, params, N](const Vector& u, const Vector& p) {
    ws->ensure_rollout(u, p);
    double value = 0.0;
    for (int t = 0; t < N; ++t)
      for (int k = 0; k < 4; ++k)
        value += params.stage_weights[k] * ws->states(k, t) * ws->states(k, t);
    for (int k = 0; k < 4; ++k)
      value += params.terminal_weights[k] * ws->states(k, N) * ws->states(k, N);
    double prev_a = p[4], prev_s = p[5];
    for (int t = 0; t < N; ++t) {
      const double da = u[2 * t] - prev_a;
      const double ds = u[2 * t + 1] - prev_s;
      value += params.rate_weights[0] * da * da + params.rate_weights[1] * ds * ds;
      prev_a = u[2 * t];
      prev_s = u[2 * t + 1];
    }
    return value;
  };

  problem.grad_cost = [ws, params, N](const Vector& u, const Vector& p, Vector& g) {
    ws->ensure_rollout(u, p);
    ws->qx.setZero();
    for (int t = 1; t < N; ++t)
      for (int k = 0; k < 4; ++k)
        ws->qx(k, t) = 2.0 * params.stage_weights[k] * ws->states(k, t);
    for (int k = 0; k < 4; ++k)
      ws->qx(k, N) = 2.0 * params.terminal_weights[k] * ws->states(k, N);
    ws->shooting.adjoint_gradient(u, ws->states, ws->qx, g);

    // Input-rate terms couple u_t to its neighbours.
    for (int t = 0; t < N; ++t) {
      const double pa = t == 0 ? p[4] : u[2 * (t - 1)];
      const double ps = t == 0 ? p[5] : u[2 * (t - 1) + 1];
      g[2 * t] += 2.0 * params.rate_weights[0] * (u[2 * t] - pa);
      g[2 * t + 1] += 2.0 * params.rate_weights[1] * (u[2 * t + 1] - ps);
      if (t + 1 < N) {
        g[2 * t] -= 2.0 * params.rate_weights[0] * (u[2 * (t + 1)] - u[2 * t]);
        g[2 * t + 1] -= 2.0 * params.rate_weights[1] * (u[2 * (t + 1) + 1] - u[2 * t + 1]);
      }
    }
  };

  Vector lower(2 * N), upper(2 * N);
  for (int t = 0; t < N; ++t) {
    lower[2 * t] = params.accel_min;
    upper[2 * t] = params.accel_max;
    lower[2 * t + 1] = -params.steer_max;
    upper[2 * t + 1] = params.steer_max;
  }
  problem.set_u = ConstraintSet::rectangle(std::move(lower), std::move(upper));

  if (encoding == ConstraintEncoding::Penalty) {
    problem.n2 = N;
    problem.f2 = [ws, params, N](const Vector& u, const Vector& p, Vector& out) {
      ws->ensure_rollout(u, p);
      for (int t = 1; t <= N; ++t)
        out[t - 1] = std::max(stage_obstacle_value(ws->states, t, params), 0.0);
    };
    problem.grad_f2_sq = [ws, params, N](const Vector& u, const Vector& p, Vector& g) {
      ws->ensure_rollout(u, p);
      ws->qx.setZero();
      // grad sum_t [g_t]_+^2 seeds each stage with 2 [g_t]_+ grad g_t; the
      // hinge zeroes the seed (and the gradient) wherever g_t <= 0.
      for (int t = 1; t <= N; ++t) {
        const double hinge = std::max(stage_obstacle_value(ws->states, t, params), 0.0);
        if (hinge > 0.0)
          add_stage_obstacle_seed(ws->qx, ws->states, t, 2.0 * hinge, params);
      }
      ws->shooting.adjoint_gradient(u, ws->states, ws->qx, g);
    };
  } else {
    problem.n1 = N;
    problem.f1 = [ws, params, N](const Vector& u, const Vector& p, Vector& out) {
      ws->ensure_rollout(u, p);
      for (int t = 1; t <= N; ++t)
        out[t - 1] = stage_obstacle_value(ws->states, t, params);
    };
    problem.jf1_t_apply = [ws, params, N](const Vector& u, const Vector& p,
                                          const Vector& w, Vector& g) {
      ws->ensure_rollout(u, p);
      ws->qx.setZero();
      for (int t = 1; t <= N; ++t)
        add_stage_obstacle_seed(ws->qx, ws->states, t, w[t - 1], params);
      ws->shooting.adjoint_gradient(u, ws->states, ws->qx, g);
    };
    const double inf = std::numeric_limits<double>::infinity();
    problem.set_c =
        ConstraintSet::rectangle(Vector::Constant(N, -inf), Vector::Zero(N));
  }
  return problem;
}

SolverConfig nmpc_config() {
  SolverConfig cfg = SolverConfig::with_tolerances(1e-4, 1e-3);
  cfg.epsilon0 = 1e-4;
  cfg.rho = 5.0;
  cfg.c0 = 500.0;
  cfg.lbfgs_memory = 20;
  return cfg;
}

NmpcClosedLoopResult run_nmpc_closed_loop(ConstraintEncoding encoding, int sim_steps,
                                          const BicycleParams& params) {
  if (sim_steps < 1) throw std::invalid_argument("run_nmpc_closed_loop: sim_steps must be >= 1");

  AlmSolver solver(make_bicycle_nmpc_problem(encoding, params), nmpc_config());

  NmpcClosedLoopResult result;
  result.states.resize(4, sim_steps + 1);
  result.inputs.resize(2, sim_steps);
  result.reports.reserve(sim_steps);

  Vector x(4);
  x << -5.0, 0.0, 0.0, 0.0;
  Vector u_prev = Vector::Zero(2);
  Vector p(6);

  result.states.col(0) = x;
  for (int step = 0; step < sim_steps; ++step) {
    p.head(4) = x;
    p.tail(2) = u_prev;
    SolverReport report = solver.solve(p);
    const Vector u_applied = report.solution.head(2);
    result.inputs.col(step) = u_applied;
    result.reports.push_back(std::move(report));
    x = bicycle_step(x, u_applied, params);
    result.states.col(step + 1) = x;
    u_prev = u_applied;
  }

  double min_sq = std::numeric_limits<double>::infinity();
  for (int t = 0; t <= sim_steps; ++t) {
    const double dx = result.states(0, t) - params.obstacle_x;
    const double dy = result.states(1, t) - params.obstacle_y;
    min_sq = std::min(min_sq, dx * dx + dy * dy);
  }
  result.min_obstacle_sq_distance = min_sq;
  return result;
}

}  // namespace panopt::bench
