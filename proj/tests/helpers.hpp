#pragma once

#include <cstdint>

#include "ot/accel.hpp"
#include "ot/data.hpp"
#include "ot/rng.hpp"

namespace ot::testing {

// Skewed 2x2 fixture used by most hand-checked numbers in the suite:
// a = (0.7, 0.3), b = (0.5, 0.5), C = [[0,1],[1,0]], epsilon = 1.
// At v = 0 everything is expressible through s = 1 / (1 + e^{-1}).
inline TransportProblem skewed_2x2() {
  Vector a(2), b(2);
  a << 0.7, 0.3;
  b << 0.5, 0.5;
  Matrix C(2, 2);
  C << 0.0, 1.0, 1.0, 0.0;
  return make_problem(a, b, C, 1.0);
}

// Uniform marginals, zero cost: v = 0 is already optimal.
inline TransportProblem flat_2x2() {
  Vector half = Vector::Constant(2, 0.5);
  return make_problem(half, half, Matrix::Zero(2, 2), 1.0);
}

// Random instance rescaled to solver units at regularization eps.
inline TransportProblem synthetic_rescaled(Eigen::Index n, Eigen::Index m,
                                           std::uint64_t seed, double eps) {
  return rescale_problem(with_epsilon(synthetic_instance(n, m, seed), eps));
}

// High-accuracy minimizer of the reduced objective, the yardstick for
// energies and radii in the diagnostics tests.
inline ReferenceSolution reference_solve(const TransportProblem& p, double tol = 1e-12,
                                         long max_iters = 4000000) {
  SolveConfig cfg;
  cfg.tol_l1 = tol;
  cfg.max_iters = max_iters;
  cfg.wall_clock = false;
  SolveResult r = sinkhorn_solve(p, Vector::Zero(p.m()), cfg);
  return ReferenceSolution{r.potentials.v, r.final_reduced_f};
}

// Zero-sum vector with entries of magnitude up to scale.
inline Vector random_zero_sum(Rng& rng, Eigen::Index m, double scale) {
  Vector v(m);
  for (Eigen::Index j = 0; j < m; ++j) v[j] = scale * (2.0 * rng.next_double() - 1.0);
  return project_zero_sum(v);
}

}  // namespace ot::testing
