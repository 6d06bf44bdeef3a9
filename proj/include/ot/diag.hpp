#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "ot/dual.hpp"
#include "ot/mirror.hpp"

namespace ot {

// One row of a solver trace. Optional entries are only filled when the run
// is instrumented (energy and radii need a reference solution, the
// condition fields an accelerated run).
struct TraceRecord {
  long iter = 0;
  double wall_time_s = 0.0;
  double marginal_violation_l1 = 0.0;
  double grad_f_l1 = 0.0;
  double reduced_f = 0.0;
  double mu = 0.0;    // 0 for plain Sinkhorn
  double alpha = 0.0; // 0 for plain Sinkhorn
  std::optional<double> energy;
  std::optional<double> cond1_lhs;
  std::optional<double> cond1_rhs;
  std::optional<double> cond2_lhs;
  std::optional<double> cond2_rhs;
  std::optional<double> metric_drift_inf;
  std::optional<double> radius_x_d;
  std::optional<double> radius_y;
};

struct SolverTrace {
  std::vector<TraceRecord> records;

  // Fixed snake_case header; optional cells are left empty in the CSV and
  // dropped from the JSON lines. Doubles render with %.17g so a repeated
  // run serializes byte-identically.
  static const char* csv_header();
  void to_csv(std::ostream& os) const;
  void to_jsonl(std::ostream& os) const;
};

// Gauge-fixed (zero-sum) high-accuracy minimizer of the reduced objective
// together with its value; the yardstick for energies and radii.
struct ReferenceSolution {
  Vector v_star;
  double f_star = 0.0;
};

// E(x, y; mu) = f(x) - f* + (mu / 2) ||y - v*||^2_{D(p(x))} with
// p(x) = grad_phi_star(grad_f(x)). Requires f* <= f(x) + 1e-9.
// mu = 0 reduces to the plain suboptimality f(x) - f*.
double lyapunov_energy(const TransportProblem& p, const Vector& x, const Vector& y,
                       double mu, const ReferenceSolution& ref);

// Same quantity assembled from precomputed pieces (f(x) and grad_f(x)),
// for callers that already paid for the row solve.
double lyapunov_energy_from_parts(const MirrorRef& m, double f_x, const Vector& grad_x,
                                  const Vector& y, double mu, const ReferenceSolution& ref);

// E minus the Bregman slack the descent step is known to win:
//   E~ = E - (theta / L~) D_{phi*}(0, grad_f(x)),
// theta = (1/2 + alpha) / (1 + alpha), L~ = 1 + alpha, alpha = sqrt(2 mu).
double shifted_energy(const TransportProblem& p, const Vector& x, const Vector& y,
                      double mu, const ReferenceSolution& ref);

// Metric-drift conditions for one accelerated transition k -> k+1.
// With D_k = D(p(x_k)) and v_k = y_k - x_k:
//   c1:  ||grad_f(x_k)||^2 in D_k^{-1} D_{k+1} D_k^{-1}
//          <  (4 - alpha^2 - 2 sqrt(alpha)) / (2 alpha (1 + alpha)^2)
//             * D_{phi*}(0, grad_f(x_k))
//   c2:  sum_j (D_{k+1} - D_k)_jj v_{k,j}^2  <  alpha^{3/2} ||v_{k+1}||^2_{D_{k+1}}
// Both sides of c2 are the squared forms; the left one is signed and may be
// negative, in which case c2 holds trivially and is recorded as is. When
// ||grad_f(x_k)||_inf < kGradFloor the check is skipped and counts as held.
struct StabilityRecord {
  double c1_lhs = 0.0;
  double c1_rhs = 0.0;
  double c2_lhs = 0.0;
  double c2_rhs = 0.0;
  bool both_hold = false;
  bool skipped = false;
};

StabilityRecord stability_conditions(const TransportProblem& p, const Vector& x_k,
                                     const Vector& x_k1, const Vector& y_k,
                                     const Vector& y_k1, double alpha);

// Gradient-reusing form; grad_k / grad_k1 must equal grad_f at x_k / x_k1.
// metric_drift_inf, when non-null, receives ||D_{k+1} - D_k||_inf.
StabilityRecord stability_conditions_from_grads(const MirrorRef& m, const Vector& grad_k,
                                                const Vector& grad_k1, const Vector& x_k,
                                                const Vector& x_k1, const Vector& y_k,
                                                const Vector& y_k1, double alpha,
                                                double* metric_drift_inf);

// Compares the regularized plan's cost against the exact unregularized
// optimum: gap = <C, plan> - OT(a, b, C), bound = epsilon log(n m), both in
// original cost units. holds iff gap <= bound + 1e-9.
struct BiasCertificate {
  double gap = 0.0;
  double bound = 0.0;
  bool holds = false;
};

BiasCertificate entropic_bias_certificate(const TransportProblem& p, const PlanDense& plan);

// Exact optimal transport cost for the two covered families:
//   - n = m <= 6 with both marginals uniform: minimum over all n!
//     permutation matrices / n (the polytope's vertices),
//   - n = m = 2 with arbitrary marginals: the feasible set is the segment
//     t in [max(0, a_1 + b_1 - 1), min(a_1, b_1)] and the cost is linear
//     in t, so the minimum sits at an endpoint.
// Uses the original cost units. Throws OracleUnavailable otherwise.
double brute_force_ot(const TransportProblem& p);

// Running maxima of the two radius proxies ||x - v*||_{D(p(x))} and
// ||y - v*||_2, which estimate the R entering the homotopy envelope.
class RadiusTracker {
 public:
  // grad_at_x avoids a second row solve; it must equal grad_f(p, x).
  // Returns the two current radii (x weighted, y plain).
  std::pair<double, double> observe(const MirrorRef& m, const Vector& grad_at_x,
                                    const Vector& x, const Vector& y,
                                    const ReferenceSolution& ref);

  double max_radius_x_d() const { return max_x_; }
  double max_radius_y() const { return max_y_; }
  double r_hat() const { return max_x_ > max_y_ ? max_x_ : max_y_; }

 private:
  double max_x_ = 0.0;
  double max_y_ = 0.0;
};

}  // namespace ot
