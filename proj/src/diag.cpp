#include "ot/diag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <vector>

#include <fmt/core.h>

namespace ot {

namespace {

// %.17g round-trips doubles exactly, so serialized traces re-read (and
// re-serialize) to the same bytes.
std::string num(double x) { return fmt::format("{:.17g}", x); }

void append_opt_csv(std::string& line, const std::optional<double>& v) {
  line += ',';
  if (v) line += num(*v);
}

void append_opt_json(std::string& line, const char* name, const std::optional<double>& v) {
  if (v) line += fmt::format(",\"{}\":{}", name, num(*v));
}

}  // namespace

const char* SolverTrace::csv_header() {
  return "iter,wall_time_s,marginal_violation_l1,grad_f_l1,reduced_f,mu,alpha,"
         "energy,cond1_lhs,cond1_rhs,cond2_lhs,cond2_rhs,metric_drift_inf,"
         "radius_x_d,radius_y";
}

void SolverTrace::to_csv(std::ostream& os) const {
  os << csv_header() << '\n';
  for (const TraceRecord& r : records) {
    std::string line = fmt::format("{},{},{},{},{},{},{}", r.iter, num(r.wall_time_s),
                                   num(r.marginal_violation_l1), num(r.grad_f_l1),
                                   num(r.reduced_f), num(r.mu), num(r.alpha));
    append_opt_csv(line, r.energy);
    append_opt_csv(line, r.cond1_lhs);
    append_opt_csv(line, r.cond1_rhs);
    append_opt_csv(line, r.cond2_lhs);
    append_opt_csv(line, r.cond2_rhs);
    append_opt_csv(line, r.metric_drift_inf);
    append_opt_csv(line, r.radius_x_d);
    append_opt_csv(line, r.radius_y);
    os << line << '\n';
  }
}

void SolverTrace::to_jsonl(std::ostream& os) const {
  for (const TraceRecord& r : records) {
    std::string line = fmt::format(
        "{{\"iter\":{},\"wall_time_s\":{},\"marginal_violation_l1\":{},"
        "\"grad_f_l1\":{},\"reduced_f\":{},\"mu\":{},\"alpha\":{}",
        r.iter, num(r.wall_time_s), num(r.marginal_violation_l1), num(r.grad_f_l1),
        num(r.reduced_f), num(r.mu), num(r.alpha));
    append_opt_json(line, "energy", r.energy);
    append_opt_json(line, "cond1_lhs", r.cond1_lhs);
    append_opt_json(line, "cond1_rhs", r.cond1_rhs);
    append_opt_json(line, "cond2_lhs", r.cond2_lhs);
    append_opt_json(line, "cond2_rhs", r.cond2_rhs);
    append_opt_json(line, "metric_drift_inf", r.metric_drift_inf);
    append_opt_json(line, "radius_x_d", r.radius_x_d);
    append_opt_json(line, "radius_y", r.radius_y);
    line += '}';
    os << line << '\n';
  }
}

double lyapunov_energy_from_parts(const MirrorRef& m, double f_x, const Vector& grad_x,
                                  const Vector& y, double mu, const ReferenceSolution& ref) {
  if (ref.f_star > f_x + 1e-9) {
    throw OtError(fmt::format("reference value {:.17g} exceeds f(x) = {:.17g}",
                              ref.f_star, f_x));
  }
  double e = f_x - ref.f_star;
  if (mu != 0.0) {
    const MetricDiag D = metric_D(m, grad_phi_star(m, grad_x));
    e += 0.5 * mu * D.quad(y - ref.v_star);
  }
  return e;
}

double lyapunov_energy(const TransportProblem& p, const Vector& x, const Vector& y,
                       double mu, const ReferenceSolution& ref) {
  const MirrorRef m = make_mirror(p.b);
  return lyapunov_energy_from_parts(m, reduced_f(p, x), grad_f(p, x), y, mu, ref);
}

double shifted_energy(const TransportProblem& p, const Vector& x, const Vector& y,
                      double mu, const ReferenceSolution& ref) {
  const MirrorRef m = make_mirror(p.b);
  const Vector g = grad_f(p, x);
  const double e = lyapunov_energy_from_parts(m, reduced_f(p, x), g, y, mu, ref);
  const double alpha = std::sqrt(2.0 * mu);
  const double theta = (0.5 + alpha) / (1.0 + alpha);
  const double l_tilde = 1.0 + alpha;
  return e - (theta / l_tilde) * bregman_phi_star_from_zero(m, g);
}

StabilityRecord stability_conditions_from_grads(const MirrorRef& m, const Vector& grad_k,
                                                const Vector& grad_k1, const Vector& x_k,
                                                const Vector& x_k1, const Vector& y_k,
                                                const Vector& y_k1, double alpha,
                                                double* metric_drift_inf) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) {
    throw OtError(fmt::format("stability conditions need alpha in (0, 2), got {:.6g}", alpha));
  }
  StabilityRecord rec;
  if (grad_k.lpNorm<Eigen::Infinity>() < kGradFloor) {
    // At a numerically stationary point the bounds degenerate to 0 < 0;
    // the transition is declared benign instead.
    rec.skipped = true;
    rec.both_hold = true;
    if (metric_drift_inf) *metric_drift_inf = 0.0;
    return rec;
  }
  const MetricDiag D_k = metric_D(m, grad_phi_star(m, grad_k));
  const MetricDiag D_k1 = metric_D(m, grad_phi_star(m, grad_k1));
  if (metric_drift_inf) {
    *metric_drift_inf = (D_k1.d - D_k.d).lpNorm<Eigen::Infinity>();
  }

  // c1: squared gradient norm in D_k^{-1} D_{k+1} D_k^{-1} against the
  // Bregman slack, scaled by the alpha-dependent headroom factor.
  rec.c1_lhs = (grad_k.array().square() * D_k1.d.array() / D_k.d.array().square()).sum();
  const double coef = (4.0 - alpha * alpha - 2.0 * std::sqrt(alpha)) /
                      (2.0 * alpha * (1.0 + alpha) * (1.0 + alpha));
  rec.c1_rhs = coef * bregman_phi_star_from_zero(m, grad_k);

  // c2: signed drift form of the momentum displacement against the new
  // metric's norm of the next displacement, both squared.
  const Vector v_k = y_k - x_k;
  const Vector v_k1 = y_k1 - x_k1;
  rec.c2_lhs = ((D_k1.d - D_k.d).array() * v_k.array().square()).sum();
  rec.c2_rhs = std::pow(alpha, 1.5) * D_k1.quad(v_k1);

  rec.both_hold = rec.c1_lhs < rec.c1_rhs && rec.c2_lhs < rec.c2_rhs;
  return rec;
}

StabilityRecord stability_conditions(const TransportProblem& p, const Vector& x_k,
                                     const Vector& x_k1, const Vector& y_k,
                                     const Vector& y_k1, double alpha) {
  const MirrorRef m = make_mirror(p.b);
  return stability_conditions_from_grads(m, grad_f(p, x_k), grad_f(p, x_k1), x_k, x_k1,
                                         y_k, y_k1, alpha, nullptr);
}

double brute_force_ot(const TransportProblem& p) {
  validate_problem(p);
  const Eigen::Index n = p.n(), mm = p.m();
  const Matrix C = p.original_cost();

  const auto uniform = [](const Vector& w) {
    const double target = 1.0 / static_cast<double>(w.size());
    return (w.array() - target).abs().maxCoeff() < 1e-12;
  };

  if (n == mm && n <= 6 && uniform(p.a) && uniform(p.b)) {
    // Vertices of the polytope with uniform marginals are the n!
    // permutation matrices divided by n; enumerate them all.
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) cost += C(i, perm[static_cast<size_t>(i)]);
      best = std::min(best, cost / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }

  if (n == 2 && mm == 2) {
    // One free parameter t = P_11; the cost is affine in t, so the minimum
    // sits at an endpoint of the feasible interval.
    const double a1 = p.a[0], b1 = p.b[0];
    const double lo = std::max(0.0, a1 + b1 - 1.0);
    const double hi = std::min(a1, b1);
    const auto cost = [&](double t) {
      return C(0, 0) * t + C(0, 1) * (a1 - t) + C(1, 0) * (b1 - t) +
             C(1, 1) * (1.0 - a1 - b1 + t);
    };
    return std::min(cost(lo), cost(hi));
  }

  throw OracleUnavailable(
      fmt::format("exact OT covers n = m <= 6 uniform or 2x2 instances, got {}x{}", n, mm));
}

BiasCertificate entropic_bias_certificate(const TransportProblem& p, const PlanDense& plan) {
  BiasCertificate cert;
  cert.gap = primal_cost(p, plan) - brute_force_ot(p);
  cert.bound = p.epsilon_original *
               std::log(static_cast<double>(p.n()) * static_cast<double>(p.m()));
  cert.holds = cert.gap <= cert.bound + 1e-9;
  return cert;
}

std::pair<double, double> RadiusTracker::observe(const MirrorRef& m, const Vector& grad_at_x,
                                                 const Vector& x, const Vector& y,
                                                 const ReferenceSolution& ref) {
  const MetricDiag D = metric_D(m, grad_phi_star(m, grad_at_x));
  const double rx = D.norm(x - ref.v_star);
  const double ry = (y - ref.v_star).norm();
  max_x_ = std::max(max_x_, rx);
  max_y_ = std::max(max_y_, ry);
  return {rx, ry};
}

}  // namespace ot
