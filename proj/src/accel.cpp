#include "ot/accel.hpp"

#include <chrono>
#include <cmath>

#include <fmt/core.h>

namespace ot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_zero_sum(const Vector& x, const char* what) {
  if (std::abs(x.sum()) > 1e-9) {
    throw GaugeViolation(fmt::format("{} must be zero-sum, got sum {:.3g}", what, x.sum()));
  }
}

// Per-iterate bookkeeping shared by the accelerated drivers: trace rows,
// energies, radii and the metric-drift conditions. Keeps the previous
// iterate around so conditions can look at the k -> k+1 transition.
class AccObserver {
 public:
  AccObserver(const TransportProblem& p, bool record_trace, long stride, bool wall_clock,
              const AccelInstrumentation* instr)
      : record_trace_(record_trace),
        stride_(stride > 0 ? stride : 1),
        wall_clock_(wall_clock),
        instr_(instr && (instr->reference || instr->stability) ? instr : nullptr),
        mirror_(make_mirror(p.b)),
        t0_(Clock::now()) {}

  void observe(long iter, const AccelState& s, bool terminal, SolverTrace& trace) {
    const StepEval& e = *s.cached_map_at_x;
    max_v_inf_ = std::max(max_v_inf_, s.x.lpNorm<Eigen::Infinity>());

    std::optional<double> energy, c1l, c1r, c2l, c2r, drift, rx, ry;
    const bool want_row = record_trace_ && (iter % stride_ == 0 || terminal);
    if (instr_) {
      const Vector y = s.w / s.alpha;
      // A column sum that underflowed to zero puts grad_f on the boundary
      // of dom phi*, where the energy metric, the radii and the drift
      // conditions do not exist; such steps keep empty cells and are not
      // counted as checked.
      if (instr_->reference) {
        try {
          energy = lyapunov_energy_from_parts(mirror_, e.f_value, e.grad, y, s.mu,
                                              *instr_->reference);
          auto [r_x, r_y] = radii_.observe(mirror_, e.grad, s.x, y, *instr_->reference);
          rx = r_x;
          ry = r_y;
        } catch (const DomainViolation&) {
          energy.reset();
        }
      }
      if (instr_->stability && have_prev_) {
        try {
          double d = 0.0;
          const StabilityRecord c = stability_conditions_from_grads(
              mirror_, prev_grad_, e.grad, prev_x_, s.x, prev_y_, y, s.alpha, &d);
          c1l = c.c1_lhs;
          c1r = c.c1_rhs;
          c2l = c.c2_lhs;
          c2r = c.c2_rhs;
          drift = d;
          conditions_checked_ += c.skipped ? 0 : 1;
          conditions_held_ += (!c.skipped && c.both_hold) ? 1 : 0;
        } catch (const DomainViolation&) {
        }
      }
      prev_grad_ = e.grad;
      prev_x_ = s.x;
      prev_y_ = y;
      have_prev_ = true;
    }

    if (want_row) {
      TraceRecord r;
      r.iter = iter;
      r.wall_time_s = wall_clock_ ? seconds_since(t0_) : 0.0;
      r.marginal_violation_l1 = e.grad_l1;
      r.grad_f_l1 = e.grad_l1;
      r.reduced_f = e.f_value;
      r.mu = s.mu;
      r.alpha = s.alpha;
      r.energy = energy;
      r.cond1_lhs = c1l;
      r.cond1_rhs = c1r;
      r.cond2_lhs = c2l;
      r.cond2_rhs = c2r;
      r.metric_drift_inf = drift;
      r.radius_x_d = rx;
      r.radius_y = ry;
      trace.records.push_back(std::move(r));
    }
  }

  // Energy of an arbitrary (x, y, mu) triple, reusing the cached eval.
  std::optional<double> stage_energy(const AccelState& s) const {
    if (!instr_ || !instr_->reference) return std::nullopt;
    const StepEval& e = *s.cached_map_at_x;
    try {
      return lyapunov_energy_from_parts(mirror_, e.f_value, e.grad, s.w / s.alpha, s.mu,
                                        *instr_->reference);
    } catch (const DomainViolation&) {
      return std::nullopt;
    }
  }

  const RadiusTracker& radii() const { return radii_; }
  double max_v_inf() const { return max_v_inf_; }
  long conditions_checked() const { return conditions_checked_; }
  long conditions_held() const { return conditions_held_; }

 private:
  bool record_trace_;
  long stride_;
  bool wall_clock_;
  const AccelInstrumentation* instr_;
  MirrorRef mirror_;
  Clock::time_point t0_;
  RadiusTracker radii_;
  Vector prev_grad_, prev_x_, prev_y_;
  bool have_prev_ = false;
  double max_v_inf_ = 0.0;
  long conditions_checked_ = 0;
  long conditions_held_ = 0;
};

}  // namespace

AccelState make_accel_state(const TransportProblem& p, const Vector& x0,
                            const Vector& w0, double mu) {
  if (x0.size() != p.m() || w0.size() != p.m()) {
    throw DimensionMismatch("accelerated state size does not match b");
  }
  if (!(mu > 0.0) || !(mu < 1.0)) throw OtError("mu must lie in (0, 1)");
  check_zero_sum(x0, "x0");
  check_zero_sum(w0, "w0");
  AccelState s;
  s.x = x0;
  s.w = w0;
  s.mu = mu;
  s.alpha = std::sqrt(2.0 * mu);
  return s;
}

AccelState acc_step(const TransportProblem& p, const AccelState& s,
                    DualWorkspace& ws, long& eval_count) {
  const double al = s.alpha;
  Vector Sx;
  if (s.cached_map_at_x) {
    Sx = s.cached_map_at_x->v_next;
  } else {
    Sx = eval_normalized_step(p, s.x, ws).v_next;
    ++eval_count;
  }
  AccelState next;
  next.mu = s.mu;
  next.alpha = al;
  next.x = (s.w + Sx) / (1.0 + al);
  StepEval e1 = eval_normalized_step(p, next.x, ws);
  ++eval_count;
  next.w = (s.w + (al * al - 2.0) * next.x + 2.0 * e1.v_next) / (1.0 + al);
  next.cached_map_at_x = std::move(e1);
  return next;
}

AccRun acc_run(const TransportProblem& p, const Vector& x0, const Vector& w0,
               double mu, long m, bool record_trace, long trace_stride,
               bool wall_clock, const AccelInstrumentation* instr) {
  validate_problem(p);
  if (m < 0) throw OtError("acc_run needs m >= 0");
  DualWorkspace ws;
  ws.resize(p);
  AccRun out;
  AccelState s = make_accel_state(p, x0, w0, mu);
  s.cached_map_at_x = eval_normalized_step(p, s.x, ws);
  ++out.evaluations;

  AccObserver obs(p, record_trace, trace_stride, wall_clock, instr);
  obs.observe(0, s, m == 0, out.trace);
  for (long k = 0; k < m; ++k) {
    s = acc_step(p, s, ws, out.evaluations);
    obs.observe(k + 1, s, k + 1 == m, out.trace);
  }
  out.final_violation = s.cached_map_at_x->grad_l1;
  out.radii = obs.radii();
  out.conditions_checked = obs.conditions_checked();
  out.conditions_held = obs.conditions_held();
  out.state = std::move(s);
  return out;
}

SolveResult acc_solve(const TransportProblem& p, const Vector& v0, double mu,
                      const SolveConfig& cfg) {
  validate_problem(p);
  validate_solve_config(cfg);
  DualWorkspace ws;
  ws.resize(p);
  SolveResult out;
  AccelState s = make_accel_state(p, project_zero_sum(v0), Vector::Zero(p.m()), mu);
  s.cached_map_at_x = eval_normalized_step(p, s.x, ws);
  ++out.evaluations;

  AccelInstrumentation instr;
  instr.reference = cfg.reference;
  AccObserver obs(p, cfg.record_trace, cfg.trace_stride, cfg.wall_clock,
                  cfg.reference ? &instr : nullptr);

  for (long k = 0;; ++k) {
    const double violation = s.cached_map_at_x->grad_l1;
    const bool done = violation < cfg.tol_l1 || k >= cfg.max_iters;
    obs.observe(k, s, done, out.trace);
    if (done) {
      out.converged = violation < cfg.tol_l1;
      out.iterations = k;
      out.final_violation = violation;
      out.final_reduced_f = s.cached_map_at_x->f_value;
      out.potentials = DualPotentials{s.cached_map_at_x->u, s.x};
      break;
    }
    s = acc_step(p, s, ws, out.evaluations);
  }
  out.max_v_inf = obs.max_v_inf();
  return out;
}

HomotopyResult homotopy_solve_instrumented(const TransportProblem& p,
                                           const HomotopyConfig& cfg,
                                           const AccelInstrumentation* instr) {
  validate_problem(p);
  if (!(cfg.mu0 > 0.0) || !(cfg.mu0 < 1.0) || cfg.m0 < 1 || cfg.max_outer < 1) {
    throw OtError("homotopy schedule needs mu0 in (0, 1), m0 >= 1, max_outer >= 1");
  }
  if (!(cfg.tol_l1 > 0.0)) throw OtError("tol_l1 must be positive");
  if (cfg.max_total_inner < 1) throw OtError("max_total_inner must be at least 1");
  if (cfg.trace_stride < 1) throw OtError("trace_stride must be at least 1");
  DualWorkspace ws;
  ws.resize(p);

  HomotopyResult out;
  SolveResult& res = out.result;
  AccelState s = make_accel_state(p, Vector::Zero(p.m()), Vector::Zero(p.m()), cfg.mu0);
  s.cached_map_at_x = eval_normalized_step(p, s.x, ws);
  ++res.evaluations;

  AccObserver obs(p, cfg.record_trace, cfg.trace_stride, cfg.wall_clock, instr);
  obs.observe(0, s, false, res.trace);

  long total_inner = 0;
  long m = cfg.m0;
  bool converged = s.cached_map_at_x->grad_l1 < cfg.tol_l1;
  bool capped = false;

  for (long stage = 0; stage < cfg.max_outer && !converged && !capped; ++stage) {
    ++res.outer_stages;
    out.boundaries.push_back(StageBoundary{stage, s.mu, s.alpha, total_inner,
                                           obs.stage_energy(s)});
    for (long i = 0; i < m; ++i) {
      if (total_inner >= cfg.max_total_inner) {
        capped = true;
        break;
      }
      s = acc_step(p, s, ws, res.evaluations);
      ++total_inner;
      converged = s.cached_map_at_x->grad_l1 < cfg.tol_l1;
      obs.observe(total_inner, s, converged || total_inner >= cfg.max_total_inner,
                  res.trace);
      if (converged) break;
    }
    if (converged || capped) break;
    // Outer update: halve mu, stretch the inner budget by sqrt(2). The
    // state carries over verbatim unless the caller asked to preserve
    // y = w / alpha instead.
    const double alpha_old = s.alpha;
    s.mu /= 2.0;
    s.alpha = std::sqrt(2.0 * s.mu);
    if (cfg.rescale_w_across_stages) s.w *= s.alpha / alpha_old;
    m = static_cast<long>(std::floor(std::sqrt(2.0) * static_cast<double>(m))) + 1;
  }

  res.converged = converged;
  res.iterations = total_inner;
  res.final_violation = s.cached_map_at_x->grad_l1;
  res.final_reduced_f = s.cached_map_at_x->f_value;
  res.potentials = DualPotentials{s.cached_map_at_x->u, s.x};
  res.max_v_inf = obs.max_v_inf();
  out.r_hat = obs.radii().r_hat();
  out.conditions_checked = obs.conditions_checked();
  out.conditions_held = obs.conditions_held();
  if (instr && instr->reference) {
    out.c_star = homotopy_rate_constant(cfg.mu0, out.r_hat);
  }
  return out;
}

SolveResult homotopy_solve(const TransportProblem& p, const HomotopyConfig& cfg) {
  return homotopy_solve_instrumented(p, cfg, nullptr).result;
}

double homotopy_rate_constant(double mu0, double r_hat, double l_f) {
  const double denom = (std::sqrt(2.0 * l_f) + std::sqrt(2.0 * mu0)) *
                       std::log(2.0 * (r_hat * r_hat + 1.0));
  return (std::sqrt(2.0) - 1.0) / denom;
}

}  // namespace ot
