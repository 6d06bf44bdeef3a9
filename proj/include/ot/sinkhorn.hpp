#pragma once

#include "ot/diag.hpp"

namespace ot {

// v+ = v + log(b ./ c_P) where c_P are the column sums of the row-solved
// plan at v. Identical, as a map, to the mirror form v - grad_phi_star(grad_f(v)).
Vector sinkhorn_v_step(const TransportProblem& p, const Vector& v);

// Zero-sum section of the step: project_zero_sum(sinkhorn_v_step(p, v)).
// The input must already be zero-sum; drift beyond |sum v| > 1e-9 throws
// GaugeViolation.
Vector normalized_sinkhorn_map(const TransportProblem& p, const Vector& v);

// One evaluation of the normalized map together with the byproducts the
// solvers reuse: everything is measured at the input point.
struct StepEval {
  Vector v_next;    // projected step output
  Vector u;         // row potentials u(v)
  Vector grad;      // c_P - b
  double grad_l1 = 0.0;
  double f_value = 0.0;
};

StepEval eval_normalized_step(const TransportProblem& p, const Vector& v,
                              DualWorkspace& ws);

struct SolveConfig {
  double tol_l1 = 1e-6;    // > 0
  long max_iters = 200000; // >= 1
  bool record_trace = false;
  long trace_stride = 1;   // >= 1
  // false stamps wall_time_s = 0 everywhere, making trace files
  // byte-identical across reruns.
  bool wall_clock = true;
  // Optional yardstick; fills the energy / radius trace columns.
  const ReferenceSolution* reference = nullptr;
};

// Enforces the config invariants above; every solver entry point calls it.
void validate_solve_config(const SolveConfig& cfg);

struct SolveResult {
  DualPotentials potentials;
  bool converged = false;
  long iterations = 0;      // map applications performed
  long evaluations = 0;     // row-solve sweeps, equals iterations + 1 here
  long outer_stages = 0;    // filled by the homotopy driver
  double final_violation = 0.0;
  double final_reduced_f = 0.0;
  double max_v_inf = 0.0;   // sup norm of the iterates, a boundedness probe
  SolverTrace trace;
};

// Fixed-point iteration of the normalized map from project_zero_sum(v0),
// stopping once the l1 marginal violation of the row-solved plan drops
// below cfg.tol_l1. The violation comes from the column sums the step
// already computed, so the check costs nothing extra.
SolveResult sinkhorn_solve(const TransportProblem& p, const Vector& v0,
                           const SolveConfig& cfg);

}  // namespace ot
