#include <benchmark/benchmark.h>

#include <random>

#include "panopt/alm.hpp"
#include "panopt/bench/bicycle_nmpc.hpp"
#include "panopt/bench/rosenbrock.hpp"
#include "panopt/inner_oracle.hpp"
#include "panopt/lbfgs.hpp"
#include "panopt/sets.hpp"

using namespace panopt;

namespace {

Vector random_vector(std::mt19937_64& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

void BM_ProjectBall2(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(1);
  const auto set = ConstraintSet::ball2(1.0);
  const Vector x = random_vector(rng, n, -2, 2);
  Vector out(n);
  for (auto _ : state) {
    set.project_into(x, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ProjectBall2)->Arg(8)->Arg(200)->Arg(1000);

void BM_ProjectRectangle(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(2);
  const auto set =
      ConstraintSet::rectangle(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0));
  const Vector x = random_vector(rng, n, -2, 2);
  Vector out(n);
  for (auto _ : state) {
    set.project_into(x, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ProjectRectangle)->Arg(8)->Arg(200)->Arg(1000);

void BM_ProjectSecondOrderCone(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(3);
  const auto set = ConstraintSet::second_order_cone(1.0);
  const Vector x = random_vector(rng, n, -2, 2);
  Vector out(n);
  for (auto _ : state) {
    set.project_into(x, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ProjectSecondOrderCone)->Arg(8)->Arg(200)->Arg(1000);

void BM_LbfgsApply(benchmark::State& state) {
  const Index n = state.range(0);
  const int memory = 20;
  std::mt19937_64 rng(4);
  LbfgsBuffer buffer(n, memory, 1e-10);
  for (int k = 0; k < memory; ++k) {
    Vector s = random_vector(rng, n, -1, 1);
    Vector y = random_vector(rng, n, -1, 1);
    if (s.dot(y) <= 0) y = s + 0.1 * y;
    buffer.update(s, y, 0.0);
  }
  const Vector r = random_vector(rng, n, -1, 1);
  Vector d(n);
  for (auto _ : state) {
    buffer.apply(r, d);
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(BM_LbfgsApply)->Arg(8)->Arg(200)->Arg(1000);

void BM_RosenbrockPsiGrad(benchmark::State& state) {
  const auto problem = bench::make_rosenbrock_problem(bench::ConstraintEncoding::Alm);
  InnerOracle oracle(problem, bench::rosenbrock_reference_parameter());
  oracle.set_penalty(1e3);
  oracle.set_multipliers(Vector::Zero(2));
  std::mt19937_64 rng(5);
  const Vector u = random_vector(rng, 5, -0.7, 0.7);
  Vector g(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle.psi(u));
    oracle.grad_psi(u, g);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_RosenbrockPsiGrad);

void BM_NmpcPsiGrad(benchmark::State& state) {
  const auto problem = bench::make_bicycle_nmpc_problem(bench::ConstraintEncoding::Penalty);
  Vector p(6);
  p << -5, 0, 0, 0, 0, 0;
  InnerOracle oracle(problem, p);
  oracle.set_penalty(500.0);
  std::mt19937_64 rng(6);
  const Vector u = random_vector(rng, problem.n, -0.2, 0.2);
  Vector g(problem.n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle.psi(u));
    oracle.grad_psi(u, g);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_NmpcPsiGrad);

void BM_RosenbrockSolve(benchmark::State& state) {
  const auto encoding = state.range(0) == 0 ? bench::ConstraintEncoding::Alm
                                            : bench::ConstraintEncoding::Penalty;
  AlmSolver solver(bench::make_rosenbrock_problem(encoding), bench::rosenbrock_config());
  const Vector p = bench::rosenbrock_reference_parameter();
  const Vector y0 = Vector::Zero(solver.problem().n1);
  for (auto _ : state) {
    auto report = solver.solve(p, Vector::Zero(5), y0);
    benchmark::DoNotOptimize(report.cost);
  }
}
BENCHMARK(BM_RosenbrockSolve)->Arg(0)->Arg(1);

// Arg 0: steady receding-horizon state (obstacle rows inactive).
// Arg 1: obstacle-active state, which replays the penalty ladder every solve.
void BM_NmpcWarmSolve(benchmark::State& state) {
  AlmSolver solver(bench::make_bicycle_nmpc_problem(bench::ConstraintEncoding::Penalty),
                   bench::nmpc_config());
  Vector p(6);
  if (state.range(0) == 0)
    p << -1.5, 0, 0, 0.5, 0, 0;
  else
    p << -5, 0, 0, 0, 0, 0;
  solver.solve(p);  // cold start outside the timed loop
  for (auto _ : state) {
    auto report = solver.solve(p);
    benchmark::DoNotOptimize(report.cost);
  }
}
BENCHMARK(BM_NmpcWarmSolve)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
