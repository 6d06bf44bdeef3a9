#pragma once

#include "ot/types.hpp"

namespace ot {

// Geometry induced by phi(v) = sum_j b_j (exp(v_j) - v_j) for a fixed
// reference marginal b. log(b) is precomputed because the conjugate-side
// maps need it on every call.
struct MirrorRef {
  Vector b;
  Vector log_b;
};

MirrorRef make_mirror(const Vector& b);

// Diagonal metric; d holds the diagonal entries.
struct MetricDiag {
  Vector d;

  // x^T diag(d) x
  double quad(const Vector& x) const { return (d.array() * x.array().square()).sum(); }
  double norm(const Vector& x) const;
};

// grad phi(v) = b .* exp(v) - b. Throws PotentialOverflow for entries
// beyond kExpOverflowBound.
Vector grad_phi(const MirrorRef& m, const Vector& v);

// grad phi*(xi) = log(1 + xi ./ b), the inverse of grad_phi. Throws
// DomainViolation if any xi_j <= -b_j.
Vector grad_phi_star(const MirrorRef& m, const Vector& xi);

// phi*(xi) = sum_j (b_j + xi_j) log(1 + xi_j / b_j) - xi_j, with phi*(0) = 0.
double phi_star(const MirrorRef& m, const Vector& xi);

// Bregman divergence of the conjugate:
//   D_{phi*}(xi, eta) = phi*(xi) - phi*(eta) - <grad phi*(eta), xi - eta>.
// The (0, eta) case collapses to sum_j (eta_j - b_j log(1 + eta_j / b_j)),
// which is what the fused path evaluates.
double bregman_phi_star(const MirrorRef& m, const Vector& xi, const Vector& eta);
double bregman_phi_star_from_zero(const MirrorRef& m, const Vector& eta);

// D(z) = diag(b .* (exp(z) - 1) ./ z) with the diagonal continued to b_j at
// z_j = 0. Uses expm1 plus a short Taylor series below |z| = 1e-8, keeping
// the identity D(z) z = grad_phi(z) exact in exact arithmetic.
MetricDiag metric_D(const MirrorRef& m, const Vector& z);

// x minus its mean; the output sums to zero exactly up to roundoff.
Vector project_zero_sum(const Vector& x);

}  // namespace ot
