#pragma once

#include "ot/types.hpp"

namespace ot {

// Discrete transport instance. `a` (size n) and `b` (size m) are strictly
// positive probability vectors, `C` is the n x m cost matrix and `epsilon`
// the regularization strength attached to the stored cost.
//
// Solvers always run on a rescaled instance where the cost has absorbed
// epsilon (C / epsilon with epsilon = 1). `epsilon_original` remembers the
// strength the instance was built with so costs can be reported in the
// caller's units; it equals `epsilon` until rescale_problem is applied.
struct TransportProblem {
  Vector a;
  Vector b;
  Matrix C;
  double epsilon = 1.0;
  double epsilon_original = 1.0;

  Eigen::Index n() const { return a.size(); }
  Eigen::Index m() const { return b.size(); }

  // Cost matrix in the units the instance was created with.
  Matrix original_cost() const { return C * (epsilon_original / epsilon); }
};

struct DualPotentials {
  Vector u;  // row potentials, size n
  Vector v;  // column potentials, size m
};

// Dense transport plan with cached marginals. make_plan recomputes the
// cache, and every producer keeps row_sums = P 1 and col_sums = P^T 1
// within 1e-12 of a fresh recomputation.
struct PlanDense {
  Matrix P;         // n x m, strictly positive
  Vector row_sums;  // P 1, length n
  Vector col_sums;  // P^T 1, length m
};

PlanDense make_plan(Matrix P);

// Throws InvalidMarginals / DimensionMismatch unless `p` is a well formed
// instance: positive marginals summing to 1 (tolerance 1e-9), matching
// cost shape, finite entries.
void validate_problem(const TransportProblem& p);

TransportProblem make_problem(Vector a, Vector b, Matrix C, double epsilon);

// Returns the instance with C / epsilon and epsilon = 1. Idempotent on an
// already rescaled instance. epsilon_original keeps the incoming strength.
TransportProblem rescale_problem(const TransportProblem& p);

// P_ij = exp(u_i + v_j - C_ij), assembled in the log domain. Throws
// PotentialOverflow if any exponent exceeds kExpOverflowBound.
PlanDense plan_from_potentials(const TransportProblem& p, const DualPotentials& d);

// ||P 1 - a||_1 + ||P^T 1 - b||_1.
double marginal_violation_l1(const TransportProblem& p, const PlanDense& plan);

// <C, P> in the instance's original cost units.
double primal_cost(const TransportProblem& p, const PlanDense& plan);

// <C, P> + epsilon * sum_ij P_ij (log P_ij - 1), evaluated with the stored
// cost and epsilon. Throws NonPositiveEntry if any P_ij <= 0.
double entropic_objective(const TransportProblem& p, const PlanDense& plan);

}  // namespace ot
