#pragma once

#include <string>
#include <vector>

#include "panopt/config.hpp"
#include "panopt/problem.hpp"

namespace panopt::bench {

/// A ready-to-serve problem: definition, reference tuning and the meaning of
/// its parameter vector.
struct BenchProblem {
  std::string id;
  std::string parameter_description;
  ProblemDefinition problem;
  SolverConfig config;
};

/// Known ids: rosenbrock-alm, rosenbrock-penalty, nmpc-alm, nmpc-penalty,
/// mhe-50, mhe-100, mhe-150.
std::vector<std::string> bench_problem_ids();

/// Throws std::invalid_argument for unknown ids.
BenchProblem make_bench_problem(const std::string& id);

}  // namespace panopt::bench
