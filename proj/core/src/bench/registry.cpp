#include "panopt/bench/registry.hpp"

#include <stdexcept>

#include "panopt/bench/bicycle_nmpc.hpp"
#include "panopt/bench/lorenz_mhe.hpp"
#include "panopt/bench/rosenbrock.hpp"

namespace panopt::bench {

std::vector<std::string> bench_problem_ids() {
  return {"rosenbrock-alm", "rosenbrock-penalty", "nmpc-alm",
          "nmpc-penalty",   "mhe-50",             "mhe-100",
          "mhe-150"};
}

BenchProblem make_bench_problem(const std::string& id) {
  if (id == "rosenbrock-alm" || id == "rosenbrock-penalty") {
    const auto encoding = id == "rosenbrock-alm" ? ConstraintEncoding::Alm
                                                 : ConstraintEncoding::Penalty;
    return {id, "p = (p1, p2, p3), 3 numbers", make_rosenbrock_problem(encoding),
            rosenbrock_config()};
  }
  if (id == "nmpc-alm" || id == "nmpc-penalty") {
    const auto encoding =
        id == "nmpc-alm" ? ConstraintEncoding::Alm : ConstraintEncoding::Penalty;
    return {id, "p = [x0 (4); previous input (2)], 6 numbers",
            make_bicycle_nmpc_problem(encoding), nmpc_config()};
  }
  if (id == "mhe-50" || id == "mhe-100" || id == "mhe-150") {
    const int horizon = id == "mhe-50" ? 50 : id == "mhe-100" ? 100 : 150;
    return {id, "p = stacked measurements y_0..y_N, 2(N+1) numbers",
            make_lorenz_mhe_problem(horizon), mhe_config()};
  }
  throw std::invalid_argument("unknown bench problem id: " + id);
}

}  // namespace panopt::bench
