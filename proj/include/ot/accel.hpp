#pragma once

#include <functional>

#include "ot/sinkhorn.hpp"

namespace ot {

// Momentum state for the accelerated iteration. w tracks alpha * y where y
// is the usual momentum sequence; alpha = sqrt(2 mu) always.
struct AccelState {
  Vector x;
  Vector w;
  double mu = 0.0;
  double alpha = 0.0;
  // Normalized-map evaluation at x, when available. Steps consume it and
  // leave the evaluation at the new x in its place, so a chain of steps
  // costs one new evaluation each.
  std::optional<StepEval> cached_map_at_x;
};

// Validates zero-sum x0 / w0 and mu in (0, 1); alpha is derived, never
// stored independently.
AccelState make_accel_state(const TransportProblem& p, const Vector& x0,
                            const Vector& w0, double mu);

// One transition with S = normalized_sinkhorn_map:
//   x+ = (w + S(x)) / (1 + alpha)
//   w+ = (w + (alpha^2 - 2) x+ + 2 S(x+)) / (1 + alpha)
// S(x) comes from the cache when present (one new evaluation), otherwise
// it is computed first (two). eval_count grows by the number of new
// evaluations; the returned state caches S(x+).
AccelState acc_step(const TransportProblem& p, const AccelState& s,
                    DualWorkspace& ws, long& eval_count);

// Optional instrumentation shared by the accelerated drivers.  Steps whose
// row-solved plan has a column that underflowed to zero mass sit on the
// boundary of the mirror domain; their optional columns stay empty and no
// condition is counted there.
struct AccelInstrumentation {
  const ReferenceSolution* reference = nullptr;  // energy + radius columns
  bool stability = false;                        // condition columns
};

struct AccRun {
  AccelState state;
  long evaluations = 0;
  double final_violation = 0.0;
  SolverTrace trace;
  RadiusTracker radii;          // populated only with a reference
  long conditions_checked = 0;  // non-skipped stability checks, if enabled
  long conditions_held = 0;
};

// m accelerated steps (m >= 0) at fixed mu from (x0, w0). Performs exactly
// m + 1 map evaluations: one to seed the cache at x0, one per step; m = 0
// leaves (x0, w0) untouched.
AccRun acc_run(const TransportProblem& p, const Vector& x0, const Vector& w0,
               double mu, long m, bool record_trace = false,
               long trace_stride = 1, bool wall_clock = true,
               const AccelInstrumentation* instr = nullptr);

// Fixed-mu accelerated solve to tolerance; the accelerated counterpart of
// sinkhorn_solve.
SolveResult acc_solve(const TransportProblem& p, const Vector& v0, double mu,
                      const SolveConfig& cfg);

struct HomotopyConfig {
  double mu0 = 0.5;
  long m0 = 4;
  long max_outer = 64;
  double tol_l1 = 1e-6;
  long max_total_inner = 20000000;
  // Stage handoff keeps (x, w) verbatim. The variant rescaling w by
  // alpha_{k+1} / alpha_k (preserving y = w / alpha instead) sits behind
  // this flag.
  bool rescale_w_across_stages = false;
  bool record_trace = false;
  long trace_stride = 1;
  bool wall_clock = true;
};

// State entering each outer stage, recorded by the instrumented driver.
struct StageBoundary {
  long stage = 0;
  double mu = 0.0;
  double alpha = 0.0;
  long inner_before = 0;          // inner iterations done before this stage
  std::optional<double> energy;   // E(x, w / alpha; mu) when a reference is given
};

struct HomotopyResult {
  SolveResult result;
  std::vector<StageBoundary> boundaries;
  double r_hat = 0.0;   // max tracked radius, with a reference
  double c_star = 0.0;  // reported rate constant, see homotopy_rate_constant
  long conditions_checked = 0;  // non-skipped stability checks, if enabled
  long conditions_held = 0;
};

// Outer schedule mu_{k+1} = mu_k / 2, m_{k+1} = floor(sqrt(2) m_k) + 1,
// checking the violation after every inner step and stopping mid-stage as
// soon as it drops below tol_l1.
HomotopyResult homotopy_solve_instrumented(const TransportProblem& p,
                                           const HomotopyConfig& cfg,
                                           const AccelInstrumentation* instr = nullptr);

SolveResult homotopy_solve(const TransportProblem& p, const HomotopyConfig& cfg);

// (sqrt(2) - 1) / ((sqrt(2 l_f) + sqrt(2 mu0)) * log(2 (r_hat^2 + 1))).
// l_f is a reporting knob with no algorithmic role; 1 matches the descent
// constant of the map and is the only value used here.
double homotopy_rate_constant(double mu0, double r_hat, double l_f = 1.0);

}  // namespace ot
