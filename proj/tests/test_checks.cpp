#include <doctest.h>

#include <cmath>
#include <random>

#include "panopt/bench/rosenbrock.hpp"
#include "panopt/checks.hpp"
#include "test_support.hpp"

using namespace panopt;

TEST_CASE("fd_gradient is near-exact on affine and quadratic functions") {
  std::mt19937_64 rng(5);
  const Vector a = testing::random_vector(rng, 4, -2, 2);
  const auto linear = [&a](const Vector& u) { return a.dot(u); };
  const Vector u = testing::random_vector(rng, 4, -1, 1);
  CHECK((fd_gradient(linear, u) - a).lpNorm<Eigen::Infinity>() <= 1e-9);

  const auto half_norm = [](const Vector& v) { return 0.5 * v.squaredNorm(); };
  Vector point(2);
  point << 1.0, 2.0;
  CHECK((fd_gradient(half_norm, point) - point).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("fd_gradient is second-order exact on random quadratics") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 10; ++rep) {
    const Index n = 3;
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) m.row(i) = testing::random_vector(rng, n, -1, 1).transpose();
    const Matrix q = m + m.transpose();
    const Vector b = testing::random_vector(rng, n, -1, 1);
    const auto f = [&](const Vector& u) { return 0.5 * u.dot(q * u) + b.dot(u); };
    const Vector u = testing::random_vector(rng, n, -2, 2);
    const Vector exact = q * u + b;
    const double scale = std::max(1.0, exact.lpNorm<Eigen::Infinity>());
    CHECK((fd_gradient(f, u) - exact).lpNorm<Eigen::Infinity>() / scale <= 1e-8);
  }
}

TEST_CASE("fd_gradient rejects non-finite functions") {
  const auto bad = [](const Vector&) { return std::nan(""); };
  CHECK_THROWS_AS(fd_gradient(bad, Vector::Zero(2)), std::runtime_error);
}

TEST_CASE("grid_minimize examples") {
  const auto box01 = ConstraintSet::rectangle(Vector::Zero(1), Vector::Ones(1));
  SUBCASE("grid point hits the parabola minimum") {
    const auto f = [](const Vector& u) { return (u[0] - 0.5) * (u[0] - 0.5); };
    const auto result = grid_minimize(f, box01, 101);
    CHECK(result.u_best[0] == doctest::Approx(0.5));
    CHECK(result.f_best == doctest::Approx(0.0));
  }
  SUBCASE("boundary minimum") {
    const auto f = [](const Vector& u) { return u[0]; };
    const auto result = grid_minimize(f, box01, 11);
    CHECK(result.u_best[0] == 0.0);
  }
  SUBCASE("refining the grid never increases the minimum") {
    const auto f = [](const Vector& u) {
      return std::sin(3.0 * u[0]) + 0.5 * u[1] * u[1] + 0.2 * u[0] * u[1];
    };
    const auto box = ConstraintSet::rectangle(Vector::Constant(2, -2.0),
                                              Vector::Constant(2, 2.0));
    double prev = std::numeric_limits<double>::infinity();
    for (int points : {11, 21, 41, 81}) {
      const double best = grid_minimize(f, box, points).f_best;
      CHECK(best <= prev + 1e-15);
      prev = best;
    }
  }
  SUBCASE("guards") {
    const auto f = [](const Vector&) { return 0.0; };
    const auto big = ConstraintSet::rectangle(Vector::Zero(4), Vector::Ones(4));
    CHECK_THROWS_AS(grid_minimize(f, big, 3), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    const auto unbounded =
        ConstraintSet::rectangle(Vector::Zero(1), Vector::Constant(1, inf));
    CHECK_THROWS_AS(grid_minimize(f, unbounded, 3), std::invalid_argument);
    CHECK_THROWS_AS(grid_minimize(f, ConstraintSet::ball2(1.0), 3),
                    std::invalid_argument);
  }
}

TEST_CASE("counting_wrapper counts every oracle and composes") {
  const auto base = bench::make_rosenbrock_problem(bench::ConstraintEncoding::Alm);
  auto [wrapped, counts] = counting_wrapper(base);
  auto [doubly, outer_counts] = counting_wrapper(wrapped);

  const Vector u = Vector::Zero(5);
  const Vector p = bench::rosenbrock_reference_parameter();
  Vector out(5);
  Vector f1_out(2);

  for (int k = 0; k < 3; ++k) doubly.cost(u, p);
  doubly.grad_cost(u, p, out);
  doubly.f1(u, p, f1_out);
  doubly.f1(u, p, f1_out);
  doubly.jf1_t_apply(u, p, Vector::Ones(2), out);

  CHECK(outer_counts->cost == 3);
  CHECK(outer_counts->grad_cost == 1);
  CHECK(outer_counts->f1 == 2);
  CHECK(outer_counts->jf1_t_apply == 1);
  CHECK(outer_counts->f2 == 0);
  // The inner wrapper saw exactly the same traffic.
  CHECK(counts->cost == 3);
  CHECK(counts->grad_cost == 1);
  CHECK(counts->f1 == 2);
  CHECK(counts->jf1_t_apply == 1);
}
