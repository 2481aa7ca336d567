// Command-line front end: solver runs for the built-in study problems, the
// TCP service, and a quick self-check of the numerical invariants.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panopt/alm.hpp"
#include "panopt/bench/bicycle_nmpc.hpp"
#include "panopt/bench/lorenz_mhe.hpp"
#include "panopt/bench/registry.hpp"
#include "panopt/bench/rosenbrock.hpp"
#include "panopt/checks.hpp"
#include "panopt/lbfgs.hpp"
#include "panopt/server.hpp"

using namespace panopt;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitBadArguments = 2;

json to_array(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json report_to_json(const SolverReport& report, bool with_vectors = true) {
  json j;
  j["exit_status"] = std::string(to_string(report.exit_status));
  j["num_outer_iterations"] = report.num_outer_iterations;
  j["num_inner_iterations"] = report.num_inner_iterations;
  j["last_fpr_norm"] = report.last_fpr_norm;
  j["delta_y_norm"] = report.delta_y_norm;
  j["f2_norm"] = report.f2_norm;
  j["penalty"] = report.penalty;
  j["cost"] = report.cost;
  j["solve_time_ms"] = report.solve_time.count() * 1e3;
  if (with_vectors) {
    j["solution"] = to_array(report.solution);
    j["lagrange_multipliers"] = to_array(report.lagrange_multipliers);
  }
  return j;
}

void write_json(const std::string& path, const json& payload) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << payload.dump(2) << "\n";
}

void print_report(const SolverReport& report) {
  std::printf("  status            %s\n", std::string(to_string(report.exit_status)).c_str());
  std::printf("  outer iterations  %d\n", report.num_outer_iterations);
  std::printf("  inner iterations  %d\n", report.num_inner_iterations);
  std::printf("  stationarity      %.3e\n", report.last_fpr_norm);
  std::printf("  delta-y norm      %.3e\n", report.delta_y_norm);
  std::printf("  f2 norm           %.3e\n", report.f2_norm);
  std::printf("  penalty           %.6g\n", report.penalty);
  std::printf("  cost              %.9g\n", report.cost);
  std::printf("  solve time        %.3f ms\n", report.solve_time.count() * 1e3);
}

bench::ConstraintEncoding parse_encoding(const std::string& name) {
  return name == "penalty" ? bench::ConstraintEncoding::Penalty
                           : bench::ConstraintEncoding::Alm;
}

int run_rosenbrock(const std::string& encoding, const std::vector<double>& p_values,
                   const std::string& out_path) {
  Vector p(3);
  for (int i = 0; i < 3; ++i) p[i] = p_values[static_cast<std::size_t>(i)];

  AlmSolver solver(bench::make_rosenbrock_problem(parse_encoding(encoding)),
                   bench::rosenbrock_config());
  const SolverReport report = solver.solve(p, Vector::Zero(5));

  std::printf("rosenbrock (%s encoding), p = (%g, %g, %g)\n", encoding.c_str(), p[0],
              p[1], p[2]);
  print_report(report);
  std::printf("  solution          [");
  for (Index i = 0; i < report.solution.size(); ++i)
    std::printf("%s%.6f", i ? ", " : "", report.solution[i]);
  std::printf("]\n");

  if (!out_path.empty()) {
    json payload;
    payload["problem"] = "rosenbrock";
    payload["encoding"] = encoding;
    payload["parameter"] = p_values;
    payload["report"] = report_to_json(report);
    write_json(out_path, payload);
  }
  return report.exit_status == ExitStatus::Converged ? kExitOk : kExitSolverFailure;
}

int run_nmpc(const std::string& encoding, int steps, const std::string& out_path,
             const std::string& csv_path) {
  const auto result = bench::run_nmpc_closed_loop(parse_encoding(encoding), steps);

  std::vector<double> times;
  int converged = 0;
  for (const auto& report : result.reports) {
    times.push_back(report.solve_time.count() * 1e3);
    converged += report.exit_status == ExitStatus::Converged;
  }
  std::sort(times.begin(), times.end());
  const double median = times[times.size() / 2];
  const Vector final_state = result.states.col(steps);

  std::printf("nmpc closed loop (%s encoding), %d steps\n", encoding.c_str(), steps);
  std::printf("  converged steps       %d / %d\n", converged, steps);
  std::printf("  median solve          %.2f ms\n", median);
  std::printf("  min obstacle distance %.4f (radius %.2f)\n",
              std::sqrt(result.min_obstacle_sq_distance),
              bench::BicycleParams{}.obstacle_radius);
  std::printf("  final state           (%.4f, %.4f, %.4f, %.4f)\n", final_state[0],
              final_state[1], final_state[2], final_state[3]);

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path);
    csv << "step,px,py,heading,v,accel,steer\n";
    for (int t = 0; t <= steps; ++t) {
      csv << t;
      for (int k = 0; k < 4; ++k) csv << "," << result.states(k, t);
      if (t < steps)
        csv << "," << result.inputs(0, t) << "," << result.inputs(1, t);
      else
        csv << ",,";
      csv << "\n";
    }
  }

  if (!out_path.empty()) {
    json payload;
    payload["problem"] = "nmpc";
    payload["encoding"] = encoding;
    payload["steps"] = steps;
    payload["median_solve_ms"] = median;
    payload["min_obstacle_distance"] = std::sqrt(result.min_obstacle_sq_distance);
    payload["final_state"] = to_array(final_state);
    json reports = json::array();
    for (const auto& report : result.reports)
      reports.push_back(report_to_json(report, /*with_vectors=*/false));
    payload["step_reports"] = std::move(reports);
    write_json(out_path, payload);
  }
  return converged == steps ? kExitOk : kExitSolverFailure;
}

int run_mhe(int horizon, int trials, std::uint64_t seed, const std::string& out_path) {
  const auto study = bench::run_mhe(horizon, trials, seed);

  int max_outer = 0, failures = 0;
  double max_penalty = 0, worst_final_error = 0;
  for (const auto& trial : study.trials) {
    max_outer = std::max(max_outer, trial.report.num_outer_iterations);
    max_penalty = std::max(max_penalty, trial.report.penalty);
    worst_final_error = std::max(worst_final_error, trial.final_state_error);
    failures += trial.report.exit_status != ExitStatus::Converged;
  }

  std::printf("mhe study, horizon %d, %d trials, base seed %llu\n", horizon, trials,
              static_cast<unsigned long long>(seed));
  std::printf("  converged trials     %d / %d\n", trials - failures, trials);
  std::printf("  max outer iterations %d\n", max_outer);
  std::printf("  max final penalty    %.1f\n", max_penalty);
  std::printf("  worst final error    %.4f\n", worst_final_error);

  if (!out_path.empty()) {
    json payload;
    payload["problem"] = "mhe";
    payload["horizon"] = horizon;
    payload["trials"] = trials;
    payload["base_seed"] = seed;
    payload["max_outer_iterations"] = max_outer;
    payload["max_penalty"] = max_penalty;
    json trial_list = json::array();
    for (const auto& trial : study.trials) {
      json t = report_to_json(trial.report, /*with_vectors=*/false);
      t["seed"] = trial.seed;
      t["max_state_error"] = trial.max_state_error;
      t["final_state_error"] = trial.final_state_error;
      t["penalty_trajectory"] = trial.penalty_trajectory;
      trial_list.push_back(std::move(t));
    }
    payload["trial_results"] = std::move(trial_list);
    write_json(out_path, payload);
  }
  return failures == 0 ? kExitOk : kExitSolverFailure;
}

int run_serve(const std::string& problem_id, const std::string& ip, int port) {
  auto entry = bench::make_bench_problem(problem_id);
  ServerConfig cfg;
  cfg.bind_ip = ip;
  cfg.port = static_cast<std::uint16_t>(port);

  std::printf("serving %s on %s:%d (%s)\n", entry.id.c_str(), ip.c_str(), port,
              entry.parameter_description.c_str());
  std::fflush(stdout);
  serve(std::move(entry.problem), std::move(entry.config), std::move(cfg));
  std::printf("server stopped\n");
  return kExitOk;
}

int run_selftest() {
  int failed = 0;
  const auto check = [&](bool ok, const char* what) {
    std::printf("  [%s] %s\n", ok ? "ok" : "FAILED", what);
    if (!ok) ++failed;
  };
  std::mt19937_64 rng(12345);
  const auto random_vec = [&rng](Index n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
  };

  {  // projection idempotence and the variational inequality
    bool ok = true;
    const auto sets = {ConstraintSet::ball2(1.1),
                       ConstraintSet::rectangle(Vector::Constant(4, -1.0),
                                                Vector::Constant(4, 0.5)),
                       ConstraintSet::second_order_cone(1.3), ConstraintSet::zero()};
    for (const auto& set : sets)
      for (int rep = 0; rep < 25 && ok; ++rep) {
        const Vector x = random_vec(4, -3, 3);
        const Vector p = set.project(x);
        ok = ok && (set.project(p) - p).lpNorm<Eigen::Infinity>() <= 1e-12;
        const Vector s = set.project(random_vec(4, -3, 3));
        ok = ok && (x - p).dot(s - p) <= 1e-9;
      }
    check(ok, "set projections: idempotence and variational inequality");
  }

  {  // the secant property of the direction buffer
    bool ok = true;
    for (int rep = 0; rep < 20 && ok; ++rep) {
      LbfgsBuffer buffer(6, 4, 1e-10);
      Vector s, y;
      for (int k = 0; k < 4; ++k) {
        s = random_vec(6, -1, 1);
        y = random_vec(6, -1, 1);
        if (s.dot(y) <= 0) y = s + 0.1 * y;
        buffer.update(s, y, 0.0);
      }
      Vector d(6);
      buffer.apply(y, d);  // newest pair satisfies H y = s
      ok = ok && (d + s).lpNorm<Eigen::Infinity>() <= 1e-9 * std::max(1.0, s.norm());
    }
    check(ok, "direction buffer: secant condition on the newest pair");
  }

  {  // gradients of the study problems against finite differences
    bool ok = true;
    const Vector p = bench::rosenbrock_reference_parameter();
    for (auto encoding :
         {bench::ConstraintEncoding::Alm, bench::ConstraintEncoding::Penalty}) {
      const auto problem = bench::make_rosenbrock_problem(encoding);
      Vector g(5);
      for (int rep = 0; rep < 25 && ok; ++rep) {
        const Vector u = random_vec(5, -0.7, 0.7);
        problem.grad_cost(u, p, g);
        const Vector fd =
            fd_gradient([&](const Vector& v) { return problem.cost(v, p); }, u);
        ok = (fd - g).lpNorm<Eigen::Infinity>() /
                 std::max(1.0, g.lpNorm<Eigen::Infinity>()) <=
             1e-5;
      }
    }
    check(ok, "study gradients match finite differences");
  }

  {  // a full constrained solve with its convergence certificate
    AlmSolver solver(bench::make_rosenbrock_problem(bench::ConstraintEncoding::Alm),
                     bench::rosenbrock_config());
    const auto report = solver.solve(bench::rosenbrock_reference_parameter(),
                                     Vector::Zero(5));
    const auto& cfg = solver.config();
    const bool ok = report.exit_status == ExitStatus::Converged &&
                    report.last_fpr_norm <= cfg.epsilon &&
                    report.f2_norm <= cfg.delta &&
                    report.delta_y_norm <= report.penalty * cfg.delta &&
                    report.solution.norm() <= 0.73 * (1 + 1e-9);
    check(ok, "constrained solve: converged with a valid certificate");
  }

  {  // analytic equality-constrained parabola
    ProblemDefinition p;
    p.n = 1;
    p.n1 = 1;
    p.cost = [](const Vector& u, const Vector&) { return 0.5 * u[0] * u[0]; };
    p.grad_cost = [](const Vector& u, const Vector&, Vector& g) { g = u; };
    p.f1 = [](const Vector& u, const Vector&, Vector& out) {
      out = Vector::Constant(1, u[0] - 1.0);
    };
    p.jf1_t_apply = [](const Vector&, const Vector&, const Vector& w, Vector& g) {
      g = w;
    };
    p.set_c = ConstraintSet::zero();
    AlmSolver solver(p, SolverConfig::with_tolerances(1e-6, 1e-6));
    const auto report = solver.solve(Vector(0), Vector::Zero(1));
    check(report.exit_status == ExitStatus::Converged &&
              std::abs(report.solution[0] - 1.0) <= 1e-3 &&
              std::abs(report.lagrange_multipliers[0] + 1.0) <= 1e-2,
          "analytic KKT pair recovered");
  }

  std::printf("selftest: %s\n", failed == 0 ? "all checks passed" : "FAILURES");
  return failed == 0 ? kExitOk : kExitSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric nonconvex solver: study problems, TCP service, selftest"};
  app.require_subcommand(1);

  std::string encoding = "alm";
  std::vector<double> p_values{1.0, 50.0, 1.5};
  std::string out_path, csv_path;
  int steps = 300;
  int horizon = 100;
  int trials = 30;
  std::uint64_t seed = 42;
  std::string problem_id, ip = "127.0.0.1";
  int port = 8333;

  auto* rosenbrock = app.add_subcommand("rosenbrock", "Solve the constrained Rosenbrock problem");
  rosenbrock->add_option("--encoding", encoding, "Constraint encoding")
      ->check(CLI::IsMember({"penalty", "alm"}));
  rosenbrock->add_option("--p", p_values, "Parameter p1,p2,p3")
      ->delimiter(',')
      ->expected(3);
  rosenbrock->add_option("--out", out_path, "Write a JSON result file");

  auto* nmpc = app.add_subcommand("nmpc", "Closed-loop obstacle-avoidance run");
  nmpc->add_option("--encoding", encoding, "Constraint encoding")
      ->check(CLI::IsMember({"penalty", "alm"}));
  nmpc->add_option("--steps", steps, "Simulation steps")->check(CLI::Range(1, 1000000));
  nmpc->add_option("--out", out_path, "Write a JSON result file");
  nmpc->add_option("--csv", csv_path, "Write the closed-loop trajectory as CSV");

  auto* mhe = app.add_subcommand("mhe", "Horizon estimation study on the chaotic system");
  mhe->add_option("--horizon", horizon, "Estimation horizon")
      ->check(CLI::IsMember({50, 100, 150}));
  mhe->add_option("--trials", trials, "Number of randomized trials")
      ->check(CLI::Range(1, 100000));
  mhe->add_option("--seed", seed, "Base seed for the trial noise");
  mhe->add_option("--out", out_path, "Write a JSON result file");

  auto* serve_cmd = app.add_subcommand("serve", "Serve one problem over TCP (NDJSON)");
  serve_cmd->add_option("--problem", problem_id, "Problem id")
      ->required()
      ->check(CLI::IsMember(bench::bench_problem_ids()));
  serve_cmd->add_option("--ip", ip, "Bind address");
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));

  app.add_subcommand("selftest", "Run the built-in invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitBadArguments;
  }

  try {
    if (rosenbrock->parsed()) return run_rosenbrock(encoding, p_values, out_path);
    if (nmpc->parsed()) return run_nmpc(encoding, steps, out_path, csv_path);
    if (mhe->parsed()) return run_mhe(horizon, trials, seed, out_path);
    if (serve_cmd->parsed()) return run_serve(problem_id, ip, port);
    return run_selftest();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolverFailure;
  }
}
