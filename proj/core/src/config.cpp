#include "panopt/config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace panopt {

SolverConfig SolverConfig::with_tolerances(double epsilon, double delta) {
  SolverConfig cfg;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.epsilon0 = std::max(epsilon, 1e-4);
  cfg.validate();
  return cfg;
}

namespace {

[[noreturn]] void bad(const char* field, const char* requirement) {
  throw std::invalid_argument("SolverConfig: " + std::string(field) + " " + requirement);
}

void require_finite_positive(double v, const char* field) {
  if (!(v > 0) || !std::isfinite(v)) bad(field, "must be positive and finite");
}

}  // namespace

void SolverConfig::validate() const {
  require_finite_positive(epsilon, "epsilon");
  require_finite_positive(delta, "delta");
  require_finite_positive(epsilon0, "epsilon0");
  if (epsilon0 < epsilon) bad("epsilon0", "must be >= epsilon");
  if (!(beta > 0) || !(beta < 1)) bad("beta", "must lie in (0, 1)");
  if (!(rho > 1) || !std::isfinite(rho)) bad("rho", "must be > 1 and finite");
  if (!(theta > 0) || !(theta < 1)) bad("theta", "must lie in (0, 1)");
  require_finite_positive(c0, "c0");
  if (y0 && !y0->allFinite()) bad("y0", "must be finite");
  if (max_outer_iters < 1) bad("max_outer_iters", "must be >= 1");
  if (max_inner_iters < 1) bad("max_inner_iters", "must be >= 1");
  if (max_duration && !(max_duration->count() > 0))
    bad("max_duration", "must be positive when set");
  if (lbfgs_memory < 1) bad("lbfgs_memory", "must be >= 1");
  if (!(alpha_gamma > 0) || !(alpha_gamma < 1)) bad("alpha_gamma", "must lie in (0, 1)");
  if (!(sigma_coeff > 0) || !(sigma_coeff < 0.5)) bad("sigma_coeff", "must lie in (0, 0.5)");
  if (max_linesearch_halvings < 0) bad("max_linesearch_halvings", "must be >= 0");
  if (!(cbfgs_epsilon >= 0) || !std::isfinite(cbfgs_epsilon))
    bad("cbfgs_epsilon", "must be finite and >= 0");
}

}  // namespace panopt
