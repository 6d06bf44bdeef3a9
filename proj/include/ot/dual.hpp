#pragma once

#include "ot/core.hpp"

namespace ot {

// Dual objective and the reduced objective obtained by solving the row
// block in closed form. Everything here works on the rescaled cost, i.e.
// the problem's stored C with its stored epsilon treated as 1; callers
// that start from an unscaled instance apply rescale_problem first.
//
// Notation: P(u, v)_ij = exp(u_i + v_j - C_ij),
//           r_P = P 1 (row sums), c_P = P^T 1 (column sums).

// F(u, v) = sum_ij exp(u_i + v_j - C_ij) - <u, a> - <v, b>.
// The mass term is accumulated as exp(logsumexp(...)) so large potentials
// lose no accuracy before the final exponential. Throws PotentialOverflow
// when the log of the total mass exceeds kExpOverflowBound.
double dual_F(const TransportProblem& p, const DualPotentials& d);

// Exact row-block minimizer of F at fixed v:
//   u_i = log a_i - logsumexp_j(v_j - C_ij).
// After this step the plan's row sums equal a exactly.
Vector row_solve(const TransportProblem& p, const Vector& v);

// Reduced objective f(v) = F(u(v), v) = 1 - <u(v), a> - <v, b>.
// The leading 1 is the plan's total mass, which the row solve pins to
// sum(a) = 1.
double reduced_f(const TransportProblem& p, const Vector& v);

// grad f(v) = c_{P(u(v), v)} - b. Components sum to zero.
Vector grad_f(const TransportProblem& p, const Vector& v);

// Scratch buffers for the fused row-solve kernel so per-iteration calls
// allocate nothing.
struct DualWorkspace {
  Matrix T;        // n x m, holds exp(v_j - C_ij - rowmax_i)
  Vector row_max;  // n
  Vector row_sum;  // n
  Vector log_a;    // n, cached log of the row marginal

  void resize(const TransportProblem& p);
};

// One fused sweep: row potentials u(v) and the column sums c_P of the
// row-solved plan. This is the solver hot path; u, col_sums and the
// workspace are caller owned.
void row_solve_marginals(const TransportProblem& p, const Vector& v,
                         DualWorkspace& ws, Vector& u, Vector& col_sums);

// Same sweep plus log c_P. Healthy columns reuse log(col_sums); columns
// whose matvec sum is too small for an accurate log (or underflows to
// zero outright, which happens at very small regularization) are
// recomputed with an exact per-column logsumexp, and col_sums is
// overwritten with exp(col_log) so the pair stays consistent. The log
// step stays finite for any finite potentials this way.
void row_solve_marginals_log(const TransportProblem& p, const Vector& v,
                             DualWorkspace& ws, Vector& u, Vector& col_sums,
                             Vector& col_log);

// Row-normalized plan P(u(v), v) written into `plan` from the workspace
// state left by row_solve_marginals for the same v.
void plan_from_workspace(const TransportProblem& p, const DualWorkspace& ws,
                         PlanDense& plan);

// Dense reduced Hessian
//   grad^2 f(v) = diag(c_P) - P^T diag(r_P)^{-1} P,
// a Schur complement of the full dual Hessian. Diagnostic only; throws
// DimensionTooLarge for m > 2000.
Matrix hessian_f(const TransportProblem& p, const Vector& v);

}  // namespace ot
