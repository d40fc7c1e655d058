#pragma once

#include <string_view>
#include <vector>

#include "hetsec/conic/problem.hpp"

namespace hetsec::conic {

enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string_view to_string(Status s);

struct SolveOptions {
  double tol = 1e-8;  // primal/dual feasibility and relative gap
  double abstol = 1e-9;
  int max_iters = 100;
  bool verbose = false;  // per-iteration log on stderr
};

struct SolveStats {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  double primal_objective = 0.0;  // in the problem's own sense, constant included
  double dual_objective = 0.0;
};

/// Primal and dual solution of a ConicProblem.
///
/// Dual sign conventions follow the Lagrangian of the minimization form:
///   LinearEq      free multiplier y
///   LinearIneq    multiplier >= 0
///   SOC           multiplier vector in the (self-dual) cone, t component first
///   PSD           multiplier matrix, Hermitian PSD at optimality
/// When the problem is a maximization the multipliers refer to the equivalent
/// minimization of the negated objective, which keeps every cone multiplier
/// in its cone.
struct SolveResult {
  Status status = Status::NumericalFailure;
  double objective_value = 0.0;
  RVec primal;                     // all real parameters
  std::vector<RVec> duals;         // one entry per constraint, in insertion order
  SolveStats stats;

  double scalar(const ConicProblem& p, VarId v) const;
  CVec vector(const ConicProblem& p, VarId v) const;
  CMat hermitian(const ConicProblem& p, VarId v) const;
  /// Multiplier of a PsdMembership constraint as a Hermitian matrix.
  CMat psd_dual(const ConicProblem& p, int constraint) const;
  bool optimal() const { return status == Status::Optimal; }
};

/// Solve with a homogeneous self-dual primal-dual interior-point method using
/// Nesterov-Todd scaling. Reentrant; the problem is only read.
SolveResult solve(const ConicProblem& problem, const SolveOptions& opts = {});
inline SolveResult solve(const ConicProblem& problem, double tol) {
  SolveOptions o;
  o.tol = tol;
  o.abstol = tol * 0.1;
  return solve(problem, o);
}

}  // namespace hetsec::conic
