#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "panopt/bench/rosenbrock.hpp"
#include "panopt/checks.hpp"
#include "panopt/panoc.hpp"
#include "test_support.hpp"

using namespace panopt;

namespace {

Vector scalar(double x) { return Vector::Constant(1, x); }

/// 1/2 (u - 3)^2 in one variable.
ProblemDefinition shifted_parabola() {
  ProblemDefinition p;
  p.n = 1;
  p.cost = [](const Vector& u, const Vector&) { return 0.5 * (u[0] - 3.0) * (u[0] - 3.0); };
  p.grad_cost = [](const Vector& u, const Vector&, Vector& g) {
    g = Vector::Constant(1, u[0] - 3.0);
  };
  return p;
}

/// The two-variable banana valley with minimizer (1, 1).
ProblemDefinition banana() {
  ProblemDefinition p;
  p.n = 2;
  p.cost = [](const Vector& u, const Vector&) {
    const double a = 1.0 - u[0];
    const double b = u[1] - u[0] * u[0];
    return a * a + 100.0 * b * b;
  };
  p.grad_cost = [](const Vector& u, const Vector&, Vector& g) {
    const double b = u[1] - u[0] * u[0];
    g.resize(2);
    g << -2.0 * (1.0 - u[0]) - 400.0 * u[0] * b, 200.0 * b;
  };
  return p;
}

}  // namespace

TEST_CASE("forward-backward operator examples") {
  SUBCASE("boundary fixed point of a clamped parabola") {
    ProblemDefinition p;
    p.n = 1;
    p.cost = [](const Vector& u, const Vector&) { return 0.5 * u[0] * u[0]; };
    p.grad_cost = [](const Vector& u, const Vector&, Vector& g) { g = u; };
    InnerOracle oracle(p, Vector(0));
    const auto box = ConstraintSet::rectangle(scalar(1.0), scalar(2.0));
    for (double gamma : {0.1, 0.5, 0.9})
      CHECK(forward_backward(oracle, box, scalar(1.0), gamma) == scalar(1.0));
  }
  SUBCASE("stationary point is fixed on the whole space") {
    auto p = testing::make_quadratic_problem(Matrix::Identity(2, 2), Vector::Zero(2));
    InnerOracle oracle(p, Vector(0));
    const Vector origin = Vector::Zero(2);
    CHECK(forward_backward(oracle, ConstraintSet::whole_space(), origin, 0.5) == origin);
  }
  SUBCASE("gradient step then radial projection") {
    auto p = testing::make_quadratic_problem(Matrix::Identity(2, 2), Vector::Zero(2));
    InnerOracle oracle(p, Vector(0));
    Vector u(2);
    u << 2.0, 0.0;
    Vector expected(2);
    expected << 1.0, 0.0;
    CHECK(forward_backward(oracle, ConstraintSet::ball2(1.0), u, 0.5) == expected);
  }
}

TEST_CASE("envelope value examples") {
  auto p = shifted_parabola();
  SUBCASE("equals psi at a stationary point on the whole space") {
    InnerOracle oracle(p, Vector(0));
    CHECK(fbe(oracle, ConstraintSet::whole_space(), scalar(3.0), 0.4) ==
          doctest::Approx(0.0));
  }
  SUBCASE("drops the distance term on the whole space") {
    InnerOracle oracle(p, Vector(0));
    const Vector u = scalar(1.0);
    const double gamma = 0.3;
    // psi = 2, grad = -2: phi = 2 - 0.15 * 4.
    CHECK(fbe(oracle, ConstraintSet::whole_space(), u, gamma) ==
          doctest::Approx(2.0 - 0.5 * gamma * 4.0));
  }
  SUBCASE("hand-evaluated clamped case") {
    ProblemDefinition q;
    q.n = 1;
    q.cost = [](const Vector& u, const Vector&) { return 0.5 * u[0] * u[0]; };
    q.grad_cost = [](const Vector& u, const Vector&, Vector& g) { g = u; };
    InnerOracle oracle(q, Vector(0));
    const auto box = ConstraintSet::rectangle(scalar(1.0), scalar(2.0));
    // u = 1.5, gamma = 0.5: step to 0.75, dist 0.25:
    // phi = 1.125 - 0.25 * 2.25 + 0.0625 = 0.625.
    CHECK(fbe(oracle, box, scalar(1.5), 0.5) == doctest::Approx(0.625));
  }
}

TEST_CASE("Lipschitz estimation examples") {
  SUBCASE("exact for the isotropic quadratic") {
    auto p = testing::make_quadratic_problem(Matrix::Identity(3, 3), Vector::Zero(3));
    InnerOracle oracle(p, Vector(0));
    CHECK(estimate_lipschitz(oracle, Vector::Ones(3)) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("exact for a stiff one-dimensional quadratic") {
    auto p = testing::make_quadratic_problem(Matrix::Constant(1, 1, 100.0), Vector::Zero(1));
    InnerOracle oracle(p, Vector(0));
    CHECK(estimate_lipschitz(oracle, scalar(2.0)) == doctest::Approx(100.0).epsilon(1e-6));
  }
  SUBCASE("affine cost floors at 1e-12") {
    ProblemDefinition p;
    p.n = 2;
    p.cost = [](const Vector& u, const Vector&) { return u.sum(); };
    p.grad_cost = [](const Vector&, const Vector&, Vector& g) { g = Vector::Ones(2); };
    InnerOracle oracle(p, Vector(0));
    CHECK(estimate_lipschitz(oracle, Vector::Zero(2)) == 1e-12);
  }
}

TEST_CASE("inner solve lands on the clamped minimizer") {
  auto p = shifted_parabola();
  InnerOracle oracle(p, Vector(0));
  SolverConfig cfg;
  PanocSolver solver(1, cfg);
  Vector u = scalar(0.0);
  const auto box = ConstraintSet::rectangle(scalar(0.0), scalar(1.0));
  const auto result = solver.solve(oracle, box, u, 1e-8, 100);
  CHECK(result.status == ExitStatus::Converged);
  CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(result.fpr_norm < 1e-8);
}

TEST_CASE("inner solve traverses the banana valley") {
  auto p = banana();
  InnerOracle oracle(p, Vector(0));
  SolverConfig cfg;
  PanocSolver solver(2, cfg);
  Vector u(2);
  u << -1.2, 1.0;
  const auto result = solver.solve(oracle, ConstraintSet::whole_space(), u, 1e-9, 2000);
  CHECK(result.status == ExitStatus::Converged);
  CHECK(std::abs(u[0] - 1.0) <= 1e-5);
  CHECK(std::abs(u[1] - 1.0) <= 1e-5);
}

TEST_CASE("first inner problem of the constrained Rosenbrock study") {
  const auto problem = bench::make_rosenbrock_problem(bench::ConstraintEncoding::Alm);
  InnerOracle oracle(problem, bench::rosenbrock_reference_parameter());
  oracle.set_penalty(1e3);
  oracle.set_multipliers(Vector::Zero(2));

  SolverConfig cfg = bench::rosenbrock_config();
  PanocSolver solver(5, cfg);
  Vector u = Vector::Zero(5);
  const auto result = solver.solve(oracle, problem.set_u, u, 1e-4, cfg.max_inner_iters);
  CHECK(result.status == ExitStatus::Converged);
  CHECK(result.fpr_norm < 1e-4);
  CHECK(u.norm() <= 0.73 * (1.0 + 1e-12));

  // Long-run projected gradient reference from the same start.
  const double lipschitz = estimate_lipschitz(oracle, Vector::Zero(5));
  const double gamma = 0.95 / lipschitz;
  Vector v = Vector::Zero(5);
  Vector grad(5), step(5), next(5);
  for (int k = 0; k < 200000; ++k) {
    oracle.grad_psi(v, grad);
    step = v - gamma * grad;
    problem.set_u.project_into(step, next);
    v.swap(next);
  }
  CHECK(oracle.psi(u) <= oracle.psi(v) + 1e-6);
}

TEST_CASE("returned iterates live in the feasible set") {
  std::mt19937_64 rng(41);
  auto p = banana();
  InnerOracle oracle(p, Vector(0));
  SolverConfig cfg;
  PanocSolver solver(2, cfg);
  const auto ball = ConstraintSet::ball2(0.6);
  for (int rep = 0; rep < 10; ++rep) {
    Vector u = testing::random_vector(rng, 2, -2, 2);
    solver.solve(oracle, ball, u, 1e-7, 500);
    CHECK(ball.distance(u) <= 1e-14);
  }
}

TEST_CASE("envelope decreases by the promised margin at fixed gamma") {
  auto p = banana();
  InnerOracle oracle(p, Vector(0));
  SolverConfig cfg;
  PanocSolver solver(2, cfg);

  std::vector<PanocIterationInfo> trace;
  solver.set_observer([&](const PanocIterationInfo& info) { trace.push_back(info); });
  Vector u(2);
  u << -1.2, 1.0;
  solver.solve(oracle, ConstraintSet::whole_space(), u, 1e-9, 2000);
  REQUIRE(trace.size() > 5);
  for (const auto& info : trace) {
    const double slack = 1e-9 * (1.0 + std::abs(info.phi_before));
    CHECK(info.phi_after <= info.phi_before - info.sigma * info.residual_sq + slack);
  }
}

TEST_CASE("backtracking doubles at most to one step past the true Lipschitz constant") {
  Matrix q = Matrix::Zero(2, 2);
  q(0, 0) = 1.0;
  q(1, 1) = 100.0;
  auto p = testing::make_quadratic_problem(q, Vector::Zero(2));
  InnerOracle oracle(p, Vector(0));

  Vector u0 = Vector::Ones(2);
  const double l0 = estimate_lipschitz(oracle, u0);
  const double l_true = 100.0;
  const int allowed = static_cast<int>(std::ceil(std::log2(l_true / l0))) + 1;

  SolverConfig cfg;
  PanocSolver solver(2, cfg);
  int total_doublings = 0;
  solver.set_observer(
      [&](const PanocIterationInfo& info) { total_doublings += info.lipschitz_doublings; });
  Vector u = u0;
  const auto result = solver.solve(oracle, ConstraintSet::whole_space(), u, 1e-10, 500);
  CHECK(result.status == ExitStatus::Converged);
  CHECK(total_doublings <= allowed);
  CHECK(total_doublings >= 1);  // the secant estimate starts below 100 here
}

TEST_CASE("the first step is exactly a projected-gradient step") {
  auto p = banana();
  InnerOracle oracle(p, Vector(0));
  SolverConfig cfg;
  PanocSolver solver(2, cfg);
  Vector u0(2);
  u0 << -1.2, 1.0;

  Vector u = u0;
  const auto result = solver.solve(oracle, ConstraintSet::whole_space(), u, 1e-12, 1);
  CHECK(result.status == ExitStatus::MaxInnerIterations);
  CHECK(result.iterations == 1);

  const double gamma = 0.95 / estimate_lipschitz(oracle, u0);
  const Vector reference = forward_backward(oracle, ConstraintSet::whole_space(), u0, gamma);
  CHECK((u - reference).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("oracle-call budget") {
  SUBCASE("immediate convergence costs at most three gradients") {
    auto p = testing::make_quadratic_problem(Matrix::Identity(3, 3), Vector::Zero(3));
    auto [counted, counts] = counting_wrapper(p);
    InnerOracle oracle(counted, Vector(0));
    SolverConfig cfg;
    PanocSolver solver(3, cfg);
    Vector u = Vector::Zero(3);
    const auto result = solver.solve(oracle, ConstraintSet::whole_space(), u, 1e-9, 50);
    CHECK(result.status == ExitStatus::Converged);
    CHECK(result.iterations == 0);
    CHECK(counts->grad_cost <= 3);
  }

  // A mild concave quartic keeps the curvature strictly below the secant
  // Lipschitz estimate along every step, so the upper-bound test never
  // triggers a doubling.
  const auto make_clamped_quadratic = [] {
    ProblemDefinition p;
    p.n = 8;
    Vector target(8);
    target << 2.0, -3.0, 0.5, 0.3, 1.7, -0.2, 0.9, -1.4;
    p.cost = [target](const Vector& u, const Vector&) {
      return 0.5 * (u - target).squaredNorm() - 1e-3 * u.array().pow(4).sum();
    };
    p.grad_cost = [target](const Vector& u, const Vector&, Vector& g) {
      g = (u - target) - 4e-3 * u.array().pow(3).matrix();
    };
    return p;
  };
  const auto box =
      ConstraintSet::rectangle(Vector::Constant(8, -1.0), Vector::Constant(8, 1.0));

  SUBCASE("ten clean iterations stay within the documented gradient bracket") {
    // With the cautious gate rejecting every pair the method takes pure
    // projected-gradient steps, which converge geometrically and cannot
    // terminate in ten iterations at this tolerance.
    auto [counted, counts] = counting_wrapper(make_clamped_quadratic());
    InnerOracle oracle(counted, Vector(0));
    SolverConfig cfg;
    cfg.cbfgs_epsilon = 1e10;
    PanocSolver solver(8, cfg);

    int halvings = 0, doublings = 0, steps = 0;
    solver.set_observer([&](const PanocIterationInfo& info) {
      halvings += info.linesearch_halvings;
      doublings += info.lipschitz_doublings;
      ++steps;
    });

    Vector u = Vector::Zero(8);
    const int n_iters = 10;
    const auto result = solver.solve(oracle, box, u, 1e-30, n_iters);
    CHECK(result.status == ExitStatus::MaxInnerIterations);
    REQUIRE(steps == n_iters);
    CHECK(halvings == 0);
    CHECK(doublings == 0);
    CHECK(counts->grad_cost >= n_iters);
    CHECK(counts->grad_cost <= 2 * n_iters + 2);
    // One envelope evaluation at the half point plus one per tried candidate.
    CHECK(counts->cost <= 2 * n_iters + halvings + doublings + 2);
  }

  SUBCASE("quasi-Newton steps stay within the bracket before convergence") {
    auto [counted, counts] = counting_wrapper(make_clamped_quadratic());
    InnerOracle oracle(counted, Vector(0));
    SolverConfig cfg;
    PanocSolver solver(8, cfg);

    int halvings = 0, doublings = 0, steps = 0;
    solver.set_observer([&](const PanocIterationInfo& info) {
      halvings += info.linesearch_halvings;
      doublings += info.lipschitz_doublings;
      ++steps;
    });

    Vector u = Vector::Zero(8);
    const int n_iters = 6;
    const auto result = solver.solve(oracle, box, u, 1e-30, n_iters);
    CHECK(result.status == ExitStatus::MaxInnerIterations);
    REQUIRE(steps == n_iters);
    CHECK(doublings == 0);
    CHECK(counts->grad_cost >= n_iters);
    CHECK(counts->grad_cost <= 2 * n_iters + 2 + halvings);
  }
}

TEST_CASE("the exit certificate survives re-evaluation from scratch") {
  const auto verify = [](ProblemDefinition p, const ConstraintSet& set_u, Vector u0,
                         double eps_bar) {
    InnerOracle oracle(p, Vector(0));
    SolverConfig cfg;
    PanocSolver solver(p.n, cfg);
    Vector u = u0;
    const auto result = solver.solve(oracle, set_u, u, eps_bar, 5000);
    REQUIRE(result.status == ExitStatus::Converged);

    // Fresh evaluations only: one forward-backward step from the returned
    // point reproduces a stationarity measure below the tolerance.
    const double gamma = result.final_gamma;
    Vector grad(p.n), grad_half(p.n), half(p.n), step(p.n);
    oracle.grad_psi(u, grad);
    step = u - gamma * grad;
    set_u.project_into(step, half);
    oracle.grad_psi(half, grad_half);
    const double measure =
        ((u - half) / gamma + grad_half - grad).lpNorm<Eigen::Infinity>();
    CHECK(measure < eps_bar);
  };

  verify(shifted_parabola(), ConstraintSet::rectangle(scalar(0.0), scalar(1.0)),
         scalar(0.0), 1e-8);
  verify(banana(), ConstraintSet::whole_space(), (Vector(2) << -1.2, 1.0).finished(),
         1e-9);
  verify(banana(), ConstraintSet::ball2(0.6), (Vector(2) << 0.5, -0.2).finished(), 1e-8);
}

TEST_CASE("a zero-halving cap restricts steps to full or fallback") {
  auto p = banana();
  InnerOracle oracle(p, Vector(0));
  SolverConfig cfg;
  cfg.max_linesearch_halvings = 0;
  PanocSolver solver(2, cfg);
  bool taus_ok = true;
  int fallbacks = 0;
  solver.set_observer([&](const PanocIterationInfo& info) {
    taus_ok = taus_ok && (info.tau == 1.0 || info.tau == 0.0);
    fallbacks += info.tau == 0.0;
  });
  Vector u(2);
  u << -1.2, 1.0;
  const auto result = solver.solve(oracle, ConstraintSet::whole_space(), u, 1e-8, 5000);
  CHECK(result.status == ExitStatus::Converged);
  CHECK(taus_ok);
  CHECK(std::abs(u[0] - 1.0) <= 1e-4);
}

TEST_CASE("an immediately expired budget reports TimeBudgetExceeded") {
  auto p = banana();
  InnerOracle oracle(p, Vector(0));
  SolverConfig cfg;
  PanocSolver solver(2, cfg);
  Vector u(2);
  u << -1.2, 1.0;
  const auto deadline = PanocSolver::Clock::now() - std::chrono::seconds(1);
  const auto result = solver.solve(oracle, ConstraintSet::whole_space(), u, 1e-9, 100,
                                   deadline);
  CHECK(result.status == ExitStatus::TimeBudgetExceeded);
  CHECK(result.iterations == 0);
}

TEST_CASE("a broken oracle reports OracleFailure") {
  ProblemDefinition p;
  p.n = 1;
  p.cost = [](const Vector&, const Vector&) { return std::nan(""); };
  p.grad_cost = [](const Vector&, const Vector&, Vector& g) { g = Vector::Zero(1); };
  InnerOracle oracle(p, Vector(0));
  SolverConfig cfg;
  PanocSolver solver(1, cfg);
  Vector u = scalar(0.5);
  const auto result = solver.solve(oracle, ConstraintSet::whole_space(), u, 1e-6, 10);
  CHECK(result.status == ExitStatus::OracleFailure);
}
