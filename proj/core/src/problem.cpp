#include "panopt/problem.hpp"

#include <cmath>

namespace panopt {

bool ValidationResult::has(ValidationIssueKind kind) const {
  for (const auto& issue : issues)
    if (issue.kind == kind) return true;
  return false;
}

std::string ValidationResult::summary() const {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += issue.message;
  }
  return out;
}

namespace {

void add(ValidationResult& r, ValidationIssueKind kind, std::string msg) {
  r.issues.push_back({kind, std::move(msg)});
}

void check_vector_output(ValidationResult& r, const char* name, const Vector& out,
                         Index expected) {
  if (out.size() != expected) {
    add(r, ValidationIssueKind::DimensionMismatch,
        std::string(name) + " wrote length " + std::to_string(out.size()) +
            ", expected " + std::to_string(expected));
  } else if (!out.allFinite()) {
    add(r, ValidationIssueKind::NonFiniteOutput,
        std::string(name) + " produced a non-finite value at the probe point");
  }
}

}  // namespace

ValidationResult validate_problem(const ProblemDefinition& p) {
  ValidationResult r;
  if (p.n < 1) {
    add(r, ValidationIssueKind::DimensionMismatch, "n must be >= 1");
    return r;
  }
  if (p.n_p < 0 || p.n1 < 0 || p.n2 < 0) {
    add(r, ValidationIssueKind::DimensionMismatch, "n_p, n1, n2 must be >= 0");
    return r;
  }

  if (!p.cost) add(r, ValidationIssueKind::MissingOracle, "cost oracle is required");
  if (!p.grad_cost) add(r, ValidationIssueKind::MissingOracle, "grad_cost oracle is required");

  if (p.n1 > 0) {
    if (!p.f1) add(r, ValidationIssueKind::MissingOracle, "n1 > 0 requires f1");
    if (!p.jf1_t_apply)
      add(r, ValidationIssueKind::MissingOracle, "n1 > 0 requires jf1_t_apply");
    if (!p.set_c) add(r, ValidationIssueKind::MissingOracle, "n1 > 0 requires set_c");
  } else {
    if (p.f1 || p.jf1_t_apply || p.set_c)
      add(r, ValidationIssueKind::MissingOracle,
          "F1 oracles/set supplied but n1 == 0");
  }
  if (p.n2 > 0) {
    if (!p.f2) add(r, ValidationIssueKind::MissingOracle, "n2 > 0 requires f2");
    if (!p.grad_f2_sq)
      add(r, ValidationIssueKind::MissingOracle, "n2 > 0 requires grad_f2_sq");
  } else if (p.f2 || p.grad_f2_sq) {
    add(r, ValidationIssueKind::MissingOracle, "F2 oracles supplied but n2 == 0");
  }

  if (auto d = p.set_u.dimension(); d && *d != p.n)
    add(r, ValidationIssueKind::DimensionMismatch, "set_u dimension does not match n");
  if (p.set_c)
    if (auto d = p.set_c->dimension(); d && *d != p.n1)
      add(r, ValidationIssueKind::DimensionMismatch, "set_c dimension does not match n1");
  if (p.set_y)
    if (auto d = p.set_y->dimension(); d && *d != p.n1)
      add(r, ValidationIssueKind::DimensionMismatch, "set_y dimension does not match n1");

  if (!r.ok()) return r;  // probing needs a structurally sound problem

  const Vector u = Vector::Zero(p.n);
  const Vector pp = Vector::Zero(p.n_p);
  Vector out;

  const double c = p.cost(u, pp);
  if (!std::isfinite(c))
    add(r, ValidationIssueKind::NonFiniteOutput, "cost is non-finite at the probe point");

  // Probes receive correctly sized storage; an oracle that assigns a
  // wrong-length expression resizes it, which is what gets flagged.
  out = Vector::Zero(p.n);
  p.grad_cost(u, pp, out);
  check_vector_output(r, "grad_cost", out, p.n);

  if (p.n1 > 0) {
    out = Vector::Zero(p.n1);
    p.f1(u, pp, out);
    check_vector_output(r, "f1", out, p.n1);

    out = Vector::Zero(p.n);
    p.jf1_t_apply(u, pp, Vector::Ones(p.n1), out);
    check_vector_output(r, "jf1_t_apply", out, p.n);
  }
  if (p.n2 > 0) {
    out = Vector::Zero(p.n2);
    p.f2(u, pp, out);
    check_vector_output(r, "f2", out, p.n2);

    out = Vector::Zero(p.n);
    p.grad_f2_sq(u, pp, out);
    check_vector_output(r, "grad_f2_sq", out, p.n);
  }
  return r;
}

}  // namespace panopt
