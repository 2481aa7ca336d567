#include "panopt/panoc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace panopt {

namespace {

constexpr double kLipschitzFloor = 1e-12;
constexpr int kMaxDoublingsPerIteration = 100;

// Rounding guard for the quadratic-upper-bound test, scaled to the terms it
// compares; without it, equality cases double L on machine noise.
double qub_margin(double psi_value, double grad_dot_r, double l_r_sq) {
  return 10.0 * std::numeric_limits<double>::epsilon() *
         (1.0 + std::abs(psi_value) + std::abs(grad_dot_r) + 0.5 * l_r_sq);
}

double lipschitz_secant(InnerOracle& oracle, const Vector& u0, const Vector& grad0,
                        Vector& point, Vector& grad) {
  point = u0;
  double h_sq = 0.0;
  for (Index i = 0; i < u0.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(u0[i]));
    point[i] += h;
    h_sq += h * h;
  }
  oracle.grad_psi(point, grad);
  if (!grad.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  return std::max((grad - grad0).norm() / std::sqrt(h_sq), kLipschitzFloor);
}

}  // namespace

Vector forward_backward(InnerOracle& oracle, const ConstraintSet& set_u,
                        const Vector& u, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("forward_backward: gamma must be positive");
  Vector grad(u.size());
  oracle.grad_psi(u, grad);
  return set_u.project(u - gamma * grad);
}

double fbe(InnerOracle& oracle, const ConstraintSet& set_u, const Vector& u,
           double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("fbe: gamma must be positive");
  Vector grad(u.size());
  oracle.grad_psi(u, grad);
  const Vector step = u - gamma * grad;
  return oracle.psi(u) - 0.5 * gamma * grad.squaredNorm() +
         set_u.squared_distance(step) / (2.0 * gamma);
}

double estimate_lipschitz(InnerOracle& oracle, const Vector& u0) {
  Vector grad0(u0.size());
  oracle.grad_psi(u0, grad0);
  if (!grad0.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  Vector point(u0.size()), grad(u0.size());
  return lipschitz_secant(oracle, u0, grad0, point, grad);
}

PanocSolver::PanocSolver(Index n, const SolverConfig& config)
    : n_(n),
      lbfgs_memory_(config.lbfgs_memory),
      alpha_gamma_(config.alpha_gamma),
      sigma_coeff_(config.sigma_coeff),
      max_halvings_(config.max_linesearch_halvings),
      lbfgs_(n, config.lbfgs_memory, config.cbfgs_epsilon) {
  config.validate();
  if (n < 1) throw std::invalid_argument("PanocSolver: n must be >= 1");
  grad_u_.resize(n);
  u_half_.resize(n);
  r_.resize(n);
  grad_half_.resize(n);
  d_.resize(n);
  cand_.resize(n);
  grad_cand_.resize(n);
  cand_half_.resize(n);
  r_cand_.resize(n);
  step_.resize(n);
  pair_y_.resize(n);
  best_u_.resize(n);
}

InnerResult PanocSolver::solve(InnerOracle& oracle, const ConstraintSet& set_u,
                               Vector& u, double epsilon_bar, int max_iters,
                               std::optional<Clock::time_point> deadline) {
  if (!(epsilon_bar > 0))
    throw std::invalid_argument("PanocSolver: epsilon_bar must be positive");
  if (u.size() != n_) throw std::invalid_argument("PanocSolver: u length does not match n");
  if (max_iters < 1) throw std::invalid_argument("PanocSolver: max_iters must be >= 1");

  constexpr double inf = std::numeric_limits<double>::infinity();
  lbfgs_.clear();

  double psi_u = oracle.psi(u);
  oracle.grad_psi(u, grad_u_);
  if (!std::isfinite(psi_u) || !grad_u_.allFinite()) {
    set_u.project_into(u, best_u_);
    u = best_u_;
    return {ExitStatus::OracleFailure, 0, inf, 0.0, 0.0};
  }

  double L = lipschitz_secant(oracle, u, grad_u_, step_, grad_half_);
  if (std::isnan(L)) {
    set_u.project_into(u, best_u_);
    u = best_u_;
    return {ExitStatus::OracleFailure, 0, inf, 0.0, 0.0};
  }
  double gamma = alpha_gamma_ / L;
  double sigma = sigma_coeff_ * gamma * (1.0 - gamma * L);

  auto compute_half = [&]() {
    step_ = u - gamma * grad_u_;
    set_u.project_into(step_, u_half_);
    r_ = u - u_half_;
  };
  auto shrink_step = [&]() {
    L *= 2.0;
    gamma *= 0.5;
    sigma *= 0.5;
    lbfgs_.clear();
    compute_half();
  };

  compute_half();
  bool grad_half_valid = false;

  double best_fpr = inf;
  best_u_ = u_half_;

  for (int iter = 0; iter < max_iters; ++iter) {
    if (deadline && Clock::now() > *deadline) {
      u = best_u_;
      return {ExitStatus::TimeBudgetExceeded, iter, best_fpr, gamma, L};
    }

    // Stationarity certificate at the projected-gradient point. A transient
    // non-finite gradient (wide penalties can overflow) gets one step-size
    // shrink before the run is declared failed.
    if (!grad_half_valid) {
      oracle.grad_psi(u_half_, grad_half_);
      if (!grad_half_.allFinite()) {
        shrink_step();
        oracle.grad_psi(u_half_, grad_half_);
        if (!grad_half_.allFinite()) {
          u = best_u_;
          return {ExitStatus::OracleFailure, iter, best_fpr, gamma, L};
        }
      }
      grad_half_valid = true;
    }
    const double fpr = (r_ / gamma + grad_half_ - grad_u_).lpNorm<Eigen::Infinity>();
    if (fpr < best_fpr) {
      best_fpr = fpr;
      best_u_ = u_half_;
    }
    if (fpr < epsilon_bar) {
      u = u_half_;
      return {ExitStatus::Converged, iter, fpr, gamma, L};
    }

    // Quadratic-upper-bound test; failure doubles L and restarts the step.
    double psi_half = oracle.psi(u_half_);
    double gr = grad_u_.dot(r_);
    double rr = r_.squaredNorm();
    int doublings = 0;
    while (!(psi_half <= psi_u - gr + 0.5 * L * rr + qub_margin(psi_u, gr, L * rr))) {
      if (++doublings > kMaxDoublingsPerIteration) {
        u = best_u_;
        return {ExitStatus::OracleFailure, iter, best_fpr, gamma, L};
      }
      shrink_step();
      grad_half_valid = false;
      psi_half = oracle.psi(u_half_);
      gr = grad_u_.dot(r_);
      rr = r_.squaredNorm();
    }

    const double res_sq = rr / (gamma * gamma);
    const double phi_u = psi_u - gr + rr / (2.0 * gamma);

    lbfgs_.apply(r_, d_);

    // With an empty buffer d == -r, so every tau lands on the
    // projected-gradient point; take it directly and reuse its evaluations.
    bool use_fb_point = lbfgs_.count() == 0;
    double tau = 1.0;
    int halvings = 0;
    bool accepted = false;
    double psi_c = 0.0, phi_c = 0.0;

    if (!use_fb_point) {
      for (halvings = 0; halvings <= max_halvings_; ++halvings) {
        cand_ = u - (1.0 - tau) * r_ + tau * d_;
        psi_c = oracle.psi(cand_);
        oracle.grad_psi(cand_, grad_cand_);
        if (std::isfinite(psi_c) && grad_cand_.allFinite()) {
          step_ = cand_ - gamma * grad_cand_;
          set_u.project_into(step_, cand_half_);
          r_cand_ = cand_ - cand_half_;
          phi_c = psi_c - grad_cand_.dot(r_cand_) + r_cand_.squaredNorm() / (2.0 * gamma);
          if (phi_c <= phi_u - sigma * res_sq) {
            accepted = true;
            break;
          }
        }
        tau *= 0.5;
      }
      use_fb_point = !accepted;
      if (use_fb_point) tau = 0.0;
    }

    if (use_fb_point) {
      // Projected-gradient fallback; it meets the decrease bound whenever the
      // upper-bound test above passed, since sigma < (gamma/2)(1 - gamma L).
      cand_ = u_half_;
      psi_c = psi_half;
      if (!grad_half_valid) {
        oracle.grad_psi(u_half_, grad_half_);
        if (!grad_half_.allFinite()) {
          u = best_u_;
          return {ExitStatus::OracleFailure, iter, best_fpr, gamma, L};
        }
        grad_half_valid = true;
      }
      grad_cand_ = grad_half_;
      step_ = cand_ - gamma * grad_cand_;
      set_u.project_into(step_, cand_half_);
      r_cand_ = cand_ - cand_half_;
      phi_c = psi_c - grad_cand_.dot(r_cand_) + r_cand_.squaredNorm() / (2.0 * gamma);
    }

    step_ = cand_ - u;
    pair_y_ = r_cand_ - r_;
    lbfgs_.update(step_, pair_y_, std::sqrt(res_sq));

    u = cand_;
    psi_u = psi_c;
    grad_u_.swap(grad_cand_);
    u_half_.swap(cand_half_);
    r_.swap(r_cand_);
    grad_half_valid = false;

    if (observer_) {
      observer_({iter, L, gamma, sigma, phi_u, phi_c, res_sq, fpr, tau, halvings,
                 doublings});
    }
  }

  u = best_u_;
  return {ExitStatus::MaxInnerIterations, max_iters, best_fpr, gamma, L};
}

}  // namespace panopt
