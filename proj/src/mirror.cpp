#include "ot/mirror.hpp"

#include <cmath>

#include <fmt/core.h>

namespace ot {

namespace {

void check_same_size(const MirrorRef& m, const Vector& x, const char* what) {
  if (x.size() != m.b.size()) {
    throw DimensionMismatch(fmt::format("{}: size {} vs reference {}", what, x.size(), m.b.size()));
  }
}

// (exp(z) - 1) / z continued through z = 0. expm1 keeps the numerator
// accurate near zero; below 1e-8 the direct quotient would divide two
// subcancelling quantities, so a 3-term series takes over (its truncation
// error is ~z^3/24 < 1e-25 there).
double expm1_over_z(double z) {
  if (std::abs(z) < 1e-8) return 1.0 + z / 2.0 + z * z / 6.0;
  return std::expm1(z) / z;
}

}  // namespace

MirrorRef make_mirror(const Vector& b) {
  if (b.size() == 0 || !(b.minCoeff() > 0.0)) {
    throw InvalidMarginals("mirror reference must be strictly positive");
  }
  return MirrorRef{b, b.array().log().matrix()};
}

double MetricDiag::norm(const Vector& x) const { return std::sqrt(quad(x)); }

Vector grad_phi(const MirrorRef& m, const Vector& v) {
  check_same_size(m, v, "grad_phi");
  if (v.maxCoeff() > kExpOverflowBound) {
    throw PotentialOverflow("grad_phi argument exceeds the exponent bound");
  }
  // b .* (exp(v) - 1), via expm1 so small v keeps full precision.
  return (m.b.array() * v.array().unaryExpr([](double z) { return std::expm1(z); })).matrix();
}

Vector grad_phi_star(const MirrorRef& m, const Vector& xi) {
  check_same_size(m, xi, "grad_phi_star");
  Vector out(xi.size());
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    const double r = xi[j] / m.b[j];
    if (r <= -1.0) {
      throw DomainViolation(fmt::format("grad_phi_star: xi[{}] = {:.6g} <= -b[{}] = {:.6g}",
                                        j, xi[j], j, -m.b[j]));
    }
    out[j] = std::log1p(r);
  }
  return out;
}

double phi_star(const MirrorRef& m, const Vector& xi) {
  check_same_size(m, xi, "phi_star");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    const double r = xi[j] / m.b[j];
    if (r <= -1.0) {
      throw DomainViolation(fmt::format("phi_star: xi[{}] out of domain", j));
    }
    acc += (m.b[j] + xi[j]) * std::log1p(r) - xi[j];
  }
  return acc;
}

double bregman_phi_star(const MirrorRef& m, const Vector& xi, const Vector& eta) {
  check_same_size(m, xi, "bregman_phi_star");
  check_same_size(m, eta, "bregman_phi_star");
  const Vector g = grad_phi_star(m, eta);
  return phi_star(m, xi) - phi_star(m, eta) - g.dot(xi - eta);
}

double bregman_phi_star_from_zero(const MirrorRef& m, const Vector& eta) {
  check_same_size(m, eta, "bregman_phi_star_from_zero");
  // D(0, eta) collapses to sum_j eta_j - b_j log(1 + eta_j / b_j).
  double acc = 0.0;
  for (Eigen::Index j = 0; j < eta.size(); ++j) {
    const double r = eta[j] / m.b[j];
    if (r <= -1.0) {
      throw DomainViolation(fmt::format("bregman_phi_star_from_zero: eta[{}] out of domain", j));
    }
    acc += eta[j] - m.b[j] * std::log1p(r);
  }
  return acc;
}

MetricDiag metric_D(const MirrorRef& m, const Vector& z) {
  check_same_size(m, z, "metric_D");
  Vector d(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    d[j] = m.b[j] * expm1_over_z(z[j]);
  }
  return MetricDiag{std::move(d)};
}

Vector project_zero_sum(const Vector& x) {
  return x.array() - x.mean();
}

}  // namespace ot
