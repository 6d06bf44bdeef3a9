#include "ot/core.hpp"

#include <cmath>

#include <fmt/core.h>

namespace ot {

void validate_problem(const TransportProblem& p) {
  if (p.a.size() == 0 || p.b.size() == 0) {
    throw DimensionMismatch("empty marginal");
  }
  if (p.C.rows() != p.a.size() || p.C.cols() != p.b.size()) {
    throw DimensionMismatch(fmt::format("cost is {}x{} but marginals are {} and {}",
                                        p.C.rows(), p.C.cols(), p.a.size(), p.b.size()));
  }
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) {
    throw OtError("epsilon must be positive and finite");
  }
  if (!p.C.allFinite()) throw OtError("cost matrix has non-finite entries");
  for (const Vector* m : {&p.a, &p.b}) {
    if (!(m->minCoeff() > 0.0)) {
      throw InvalidMarginals("marginals must be strictly positive");
    }
    if (std::abs(m->sum() - 1.0) > 1e-9) {
      throw InvalidMarginals(fmt::format("marginal sums to {:.17g}, expected 1", m->sum()));
    }
  }
}

TransportProblem make_problem(Vector a, Vector b, Matrix C, double epsilon) {
  TransportProblem p;
  p.a = std::move(a);
  p.b = std::move(b);
  p.C = std::move(C);
  p.epsilon = epsilon;
  p.epsilon_original = epsilon;
  validate_problem(p);
  return p;
}

TransportProblem rescale_problem(const TransportProblem& p) {
  validate_problem(p);
  TransportProblem out = p;
  out.C /= p.epsilon;
  out.epsilon = 1.0;
  out.epsilon_original = p.epsilon_original;
  return out;
}

PlanDense make_plan(Matrix P) {
  PlanDense plan;
  plan.row_sums = P.rowwise().sum();
  plan.col_sums = P.colwise().sum().transpose();
  plan.P = std::move(P);
  return plan;
}

PlanDense plan_from_potentials(const TransportProblem& p, const DualPotentials& d) {
  if (d.u.size() != p.n() || d.v.size() != p.m()) {
    throw DimensionMismatch("potential sizes do not match the instance");
  }
  Matrix E = (-p.C);
  E.colwise() += d.u;
  E.rowwise() += d.v.transpose();
  const double top = E.maxCoeff();
  if (top > kExpOverflowBound) {
    throw PotentialOverflow(fmt::format("plan exponent {:.3g} exceeds bound", top));
  }
  return make_plan(E.array().exp().matrix());
}

double marginal_violation_l1(const TransportProblem& p, const PlanDense& plan) {
  return (plan.row_sums - p.a).lpNorm<1>() + (plan.col_sums - p.b).lpNorm<1>();
}

double primal_cost(const TransportProblem& p, const PlanDense& plan) {
  return p.C.cwiseProduct(plan.P).sum() * (p.epsilon_original / p.epsilon);
}

double entropic_objective(const TransportProblem& p, const PlanDense& plan) {
  double ent = 0.0;
  for (Eigen::Index i = 0; i < plan.P.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.P.cols(); ++j) {
      const double q = plan.P(i, j);
      if (!(q > 0.0)) {
        throw NonPositiveEntry(fmt::format("plan entry ({}, {}) = {:.17g}", i, j, q));
      }
      ent += q * (std::log(q) - 1.0);
    }
  }
  return p.C.cwiseProduct(plan.P).sum() + p.epsilon * ent;
}

}  // namespace ot
