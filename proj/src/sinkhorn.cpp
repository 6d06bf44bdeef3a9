#include "ot/sinkhorn.hpp"

#include <chrono>
#include <cmath>

#include <fmt/core.h>

namespace ot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Column log-masses are finite for any finite potentials (the logsumexp
// fallback never underflows), so this only fires on poisoned input.
void check_col_log_finite(const Vector& col_log) {
  if (!col_log.allFinite()) {
    throw DomainViolation(fmt::format("column log-mass degenerated to {:.3g}",
                                      col_log.minCoeff()));
  }
}

}  // namespace

void validate_solve_config(const SolveConfig& cfg) {
  if (!(cfg.tol_l1 > 0.0)) throw OtError("tol_l1 must be positive");
  if (cfg.max_iters < 1) throw OtError("max_iters must be at least 1");
  if (cfg.trace_stride < 1) throw OtError("trace_stride must be at least 1");
}

Vector sinkhorn_v_step(const TransportProblem& p, const Vector& v) {
  DualWorkspace ws;
  ws.resize(p);
  Vector u(p.n()), col(p.m()), col_log(p.m());
  row_solve_marginals_log(p, v, ws, u, col, col_log);
  check_col_log_finite(col_log);
  return v + (p.b.array().log().matrix() - col_log);
}

Vector normalized_sinkhorn_map(const TransportProblem& p, const Vector& v) {
  if (std::abs(v.sum()) > 1e-9) {
    throw GaugeViolation(fmt::format("normalized map fed sum(v) = {:.3g}", v.sum()));
  }
  return project_zero_sum(sinkhorn_v_step(p, v));
}

StepEval eval_normalized_step(const TransportProblem& p, const Vector& v,
                              DualWorkspace& ws) {
  StepEval e;
  e.u.resize(p.n());
  Vector col(p.m()), col_log(p.m());
  row_solve_marginals_log(p, v, ws, e.u, col, col_log);
  check_col_log_finite(col_log);
  e.grad = col - p.b;
  e.grad_l1 = e.grad.lpNorm<1>();
  e.f_value = 1.0 - e.u.dot(p.a) - v.dot(p.b);
  e.v_next = project_zero_sum(v + (p.b.array().log().matrix() - col_log));
  return e;
}

SolveResult sinkhorn_solve(const TransportProblem& p, const Vector& v0,
                           const SolveConfig& cfg) {
  validate_problem(p);
  validate_solve_config(cfg);
  if (v0.size() != p.m()) throw DimensionMismatch("v0 size does not match b");

  DualWorkspace ws;
  ws.resize(p);
  const MirrorRef mirror = cfg.reference ? make_mirror(p.b) : MirrorRef{};
  const long stride = cfg.trace_stride;

  SolveResult out;
  Vector v = project_zero_sum(v0);
  const auto t0 = Clock::now();

  for (long k = 0;; ++k) {
    StepEval e = eval_normalized_step(p, v, ws);
    ++out.evaluations;
    out.max_v_inf = std::max(out.max_v_inf, v.lpNorm<Eigen::Infinity>());
    // Rows of the row-solved plan match a exactly, so the whole violation
    // lives in the column sums.
    const double violation = e.grad_l1;
    const bool done = violation < cfg.tol_l1 || k >= cfg.max_iters;

    if (cfg.record_trace && (k % stride == 0 || done)) {
      TraceRecord r;
      r.iter = k;
      r.wall_time_s = cfg.wall_clock ? seconds_since(t0) : 0.0;
      r.marginal_violation_l1 = violation;
      r.grad_f_l1 = e.grad_l1;
      r.reduced_f = e.f_value;
      if (cfg.reference) {
        r.energy = e.f_value - cfg.reference->f_star;
        const MetricDiag D = metric_D(mirror, grad_phi_star(mirror, e.grad));
        r.radius_x_d = D.norm(v - cfg.reference->v_star);
      }
      out.trace.records.push_back(std::move(r));
    }

    if (done) {
      out.converged = violation < cfg.tol_l1;
      out.iterations = k;
      out.final_violation = violation;
      out.final_reduced_f = e.f_value;
      out.potentials = DualPotentials{std::move(e.u), v};
      break;
    }
    v = std::move(e.v_next);
  }
  return out;
}

}  // namespace ot
