#include "ot/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

namespace ot {

namespace {

void check_v(const TransportProblem& p, const Vector& v) {
  if (v.size() != p.m()) {
    throw DimensionMismatch(fmt::format("v has size {}, expected {}", v.size(), p.m()));
  }
  if (!v.allFinite()) throw OtError("v has non-finite entries");
}

}  // namespace

void DualWorkspace::resize(const TransportProblem& p) {
  T.resize(p.n(), p.m());
  row_max.resize(p.n());
  row_sum.resize(p.n());
  log_a = p.a.array().log().matrix();
}

void row_solve_marginals(const TransportProblem& p, const Vector& v,
                         DualWorkspace& ws, Vector& u, Vector& col_sums) {
  check_v(p, v);
  // T starts as the row exponents v_j - C_ij; subtracting each row's max
  // keeps every exponential in (0, 1].
  ws.T = (-p.C).rowwise() + v.transpose();
  ws.row_max = ws.T.rowwise().maxCoeff();
  ws.T = (ws.T.colwise() - ws.row_max).array().exp().matrix();
  ws.row_sum = ws.T.rowwise().sum();
  u = ws.log_a - ws.row_max - ws.row_sum.array().log().matrix();
  // Row i of the row-solved plan is a_i * T_i / row_sum_i, so the column
  // sums are one matvec away.
  col_sums.noalias() = ws.T.transpose() * p.a.cwiseQuotient(ws.row_sum);
}

void row_solve_marginals_log(const TransportProblem& p, const Vector& v,
                             DualWorkspace& ws, Vector& u, Vector& col_sums,
                             Vector& col_log) {
  row_solve_marginals(p, v, ws, u, col_sums);
  col_log.resize(p.m());
  // Below this the matvec result has eaten into the subnormal range (or
  // vanished entirely) and its log is unusable; the exact column
  // logsumexp costs O(n) per affected column and only triggers in the
  // tiny-regularization regime.
  constexpr double tiny = 1e-280;
  for (Eigen::Index j = 0; j < p.m(); ++j) {
    if (col_sums[j] >= tiny) {
      col_log[j] = std::log(col_sums[j]);
      continue;
    }
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p.n(); ++i) {
      top = std::max(top, u[i] + v[j] - p.C(i, j));
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.n(); ++i) {
      s += std::exp(u[i] + v[j] - p.C(i, j) - top);
    }
    col_log[j] = top + std::log(s);
    col_sums[j] = std::exp(col_log[j]);
  }
}

void plan_from_workspace(const TransportProblem& p, const DualWorkspace& ws,
                         PlanDense& plan) {
  plan.P = ws.T;
  plan.P.array().colwise() *= (p.a.array() / ws.row_sum.array());
  plan.row_sums = plan.P.rowwise().sum();
  plan.col_sums = plan.P.colwise().sum().transpose();
}

Vector row_solve(const TransportProblem& p, const Vector& v) {
  DualWorkspace ws;
  ws.resize(p);
  Vector u(p.n()), col(p.m());
  row_solve_marginals(p, v, ws, u, col);
  return u;
}

double dual_F(const TransportProblem& p, const DualPotentials& d) {
  if (d.u.size() != p.n() || d.v.size() != p.m()) {
    throw DimensionMismatch("potential sizes do not match the instance");
  }
  Matrix E = (-p.C);
  E.colwise() += d.u;
  E.rowwise() += d.v.transpose();
  const double top = E.maxCoeff();
  const double lse = top + std::log((E.array() - top).exp().sum());
  if (lse > kExpOverflowBound) {
    throw PotentialOverflow(fmt::format("dual mass exponent {:.3g} exceeds bound", lse));
  }
  return std::exp(lse) - d.u.dot(p.a) - d.v.dot(p.b);
}

double reduced_f(const TransportProblem& p, const Vector& v) {
  const Vector u = row_solve(p, v);
  // The row solve pins the plan's total mass to sum(a) = 1, which is the
  // leading term of F.
  return 1.0 - u.dot(p.a) - v.dot(p.b);
}

Vector grad_f(const TransportProblem& p, const Vector& v) {
  DualWorkspace ws;
  ws.resize(p);
  Vector u(p.n()), col(p.m());
  row_solve_marginals(p, v, ws, u, col);
  return col - p.b;
}

Matrix hessian_f(const TransportProblem& p, const Vector& v) {
  if (p.m() > 2000) {
    throw DimensionTooLarge(fmt::format("dense reduced Hessian capped at m = 2000, got {}", p.m()));
  }
  DualWorkspace ws;
  ws.resize(p);
  Vector u(p.n()), col(p.m());
  row_solve_marginals(p, v, ws, u, col);
  PlanDense plan;
  plan_from_workspace(p, ws, plan);
  // After the row solve the plan's row sums are exactly a, so the Schur
  // term is P^T diag(a)^{-1} P.
  Matrix Pw = plan.P;
  Pw.array().colwise() /= p.a.array();
  Matrix H(p.m(), p.m());
  H.noalias() = -(plan.P.transpose() * Pw);
  H += col.asDiagonal();
  return H;
}

}  // namespace ot
