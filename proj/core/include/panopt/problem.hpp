#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "panopt/sets.hpp"
#include "panopt/types.hpp"

namespace panopt {

/// A parametric problem
///
///   minimize f(u, p)  over u in U
///   subject to F1(u, p) in C   (multiplier-handled)
///              F2(u, p) = 0    (penalty-handled)
///
/// given through user oracles. Oracles must be pure in (u, p): repeated
/// evaluation at identical inputs yields identical outputs. Output vectors
/// are written into caller-owned storage; a well-behaved oracle writes
/// without resizing, so the solver loops never allocate.
///
/// The solver never calls an oracle concurrently with itself; oracles must
/// tolerate being called from whichever single thread runs the solve.
struct ProblemDefinition {
  using CostFn = std::function<double(const Vector& u, const Vector& p)>;
  using VectorFn = std::function<void(const Vector& u, const Vector& p, Vector& out)>;
  using JacTransposeApplyFn =
      std::function<void(const Vector& u, const Vector& p, const Vector& w, Vector& out)>;

  /// Decision-variable dimension.
  Index n = 0;
  /// Parameter dimension.
  Index n_p = 0;
  /// Range dimension of F1; 0 disables the multiplier-handled constraints.
  Index n1 = 0;
  /// Range dimension of F2; 0 disables the penalty-handled constraints.
  Index n2 = 0;

  CostFn cost;
  /// Gradient of the cost in u, length n.
  VectorFn grad_cost;
  /// F1(u, p), length n1. Required iff n1 > 0.
  VectorFn f1;
  /// out = JF1(u, p)^T w for w of length n1; an action, never a materialized
  /// Jacobian, which keeps storage at O(n + n1).
  JacTransposeApplyFn jf1_t_apply;
  /// F2(u, p), length n2. Required iff n2 > 0.
  VectorFn f2;
  /// out = grad of ||F2(u, p)||^2 (the plain squared norm; the solver applies
  /// the c/2 scaling itself, so penalty changes never touch user code).
  VectorFn grad_f2_sq;

  ConstraintSet set_u = ConstraintSet::whole_space();
  /// Convex target set of F1; required iff n1 > 0.
  std::optional<ConstraintSet> set_c;
  /// Compact multiplier rectangle; derived from set_c when absent.
  std::optional<ConstraintSet> set_y;
};

enum class ValidationIssueKind {
  MissingOracle,
  DimensionMismatch,
  NonFiniteOutput,
};

struct ValidationIssue {
  ValidationIssueKind kind;
  std::string message;
};

struct ValidationResult {
  std::vector<ValidationIssue> issues;
  [[nodiscard]] bool ok() const { return issues.empty(); }
  [[nodiscard]] bool has(ValidationIssueKind kind) const;
  /// All messages joined for error reporting.
  [[nodiscard]] std::string summary() const;
};

/// Checks the presence/dimension invariants and probes every supplied oracle
/// once at u = 0, p = 0, flagging wrong output lengths and non-finite values.
ValidationResult validate_problem(const ProblemDefinition& problem);

}  // namespace panopt
