#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "ot/sinkhorn.hpp"

using namespace ot;
using ot::testing::flat_2x2;
using ot::testing::random_zero_sum;
using ot::testing::skewed_2x2;
using ot::testing::synthetic_rescaled;

TEST_SUITE("sinkhorn") {

TEST_CASE("v step closed forms") {
  TransportProblem p = skewed_2x2();
  Vector s = sinkhorn_v_step(p, Vector::Zero(2));
  CHECK(s[0] == doctest::Approx(-0.16961353661935374).epsilon(1e-13));
  CHECK(s[1] == doctest::Approx(0.20437928511464884).epsilon(1e-13));

  CHECK(sinkhorn_v_step(flat_2x2(), Vector::Zero(2)).lpNorm<Eigen::Infinity>() <= 1e-15);

  SUBCASE("stationary at the reference minimizer") {
    ReferenceSolution ref = ot::testing::reference_solve(p, 1e-13);
    CHECK((sinkhorn_v_step(p, ref.v_star) - ref.v_star).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("v step is mirror descent with unit step") {
  Rng rng(83);
  for (const auto& p : {skewed_2x2(), synthetic_rescaled(6, 4, 21, 0.4),
                        synthetic_rescaled(3, 8, 22, 1.5)}) {
    MirrorRef m = make_mirror(p.b);
    for (int t = 0; t < 12; ++t) {
      Vector v = random_zero_sum(rng, p.m(), 2.0);
      Vector lhs = sinkhorn_v_step(p, v);
      Vector rhs = v - grad_phi_star(m, grad_f(p, v));
      CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
}

TEST_CASE("normalized map projects the step and guards the gauge") {
  TransportProblem p = skewed_2x2();
  Vector z = normalized_sinkhorn_map(p, Vector::Zero(2));
  CHECK(z[0] == doctest::Approx(-0.18699641086700131).epsilon(1e-13));
  CHECK(z[1] == doctest::Approx(0.18699641086700131).epsilon(1e-13));
  CHECK(std::abs(z.sum()) <= 1e-12);

  SUBCASE("rejects off-gauge inputs") {
    Vector bad(2);
    bad << 0.5, 0.4;
    CHECK_THROWS_AS(normalized_sinkhorn_map(p, bad), GaugeViolation);
  }
  SUBCASE("fixed point of the projected map") {
    ReferenceSolution ref = ot::testing::reference_solve(p, 1e-13);
    CHECK((normalized_sinkhorn_map(p, ref.v_star) - ref.v_star).lpNorm<Eigen::Infinity>() <=
          1e-12);
  }
}

TEST_CASE("eval_normalized_step bundles the map with its diagnostics") {
  TransportProblem p = synthetic_rescaled(5, 5, 33, 0.6);
  DualWorkspace ws;
  ws.resize(p);
  Rng rng(89);
  for (int t = 0; t < 6; ++t) {
    Vector v = random_zero_sum(rng, p.m(), 1.5);
    StepEval e = eval_normalized_step(p, v, ws);
    CHECK((e.v_next - normalized_sinkhorn_map(p, v)).lpNorm<Eigen::Infinity>() <= 1e-13);
    CHECK((e.u - row_solve(p, v)).lpNorm<Eigen::Infinity>() <= 1e-13);
    CHECK((e.grad - grad_f(p, v)).lpNorm<Eigen::Infinity>() <= 1e-13);
    CHECK(e.grad_l1 == doctest::Approx(e.grad.lpNorm<1>()).epsilon(1e-14));
    CHECK(e.f_value == doctest::Approx(reduced_f(p, v)).epsilon(1e-13));
    CHECK(std::abs(e.v_next.sum()) <= 1e-12);
  }
}

TEST_CASE("each step wins at least the Bregman slack") {
  // f(v+) - f(v) <= -D(0, grad(v)) - phi_star(grad(v+)), checked along
  // whole trajectories.
  for (const auto& p : {skewed_2x2(), synthetic_rescaled(5, 7, 44, 0.1),
                        synthetic_rescaled(8, 3, 45, 1.0)}) {
    MirrorRef m = make_mirror(p.b);
    Vector v = Vector::Zero(p.m());
    for (int k = 0; k < 120; ++k) {
      Vector v_next = normalized_sinkhorn_map(p, v);
      const double drop = reduced_f(p, v_next) - reduced_f(p, v);
      const double slack = -bregman_phi_star_from_zero(m, grad_f(p, v)) -
                           phi_star(m, grad_f(p, v_next));
      CHECK(drop <= slack + 1e-10);
      v = v_next;
    }
  }
}

TEST_CASE("per-iterate certificate bounds phi_star of the gradient") {
  TransportProblem p = synthetic_rescaled(6, 6, 55, 0.2);
  MirrorRef m = make_mirror(p.b);
  const int K = 80;
  std::vector<Vector> iterates;
  Vector v = Vector::Zero(p.m());
  for (int k = 0; k <= 10 * K; ++k) {
    if (k <= K) iterates.push_back(v);
    v = normalized_sinkhorn_map(p, v);
  }
  const double f0 = reduced_f(p, iterates[0]);
  const double f_floor = reduced_f(p, v);
  for (int k = 1; k <= K; ++k) {
    CHECK(phi_star(m, grad_f(p, iterates[static_cast<size_t>(k)])) <=
          (f0 - f_floor) / static_cast<double>(k) + 1e-12);
  }
}

TEST_CASE("tail of the value gap decays geometrically") {
  // Regularization small enough that the linear phase stretches over
  // dozens of iterations before hitting the floor.
  TransportProblem p = synthetic_rescaled(5, 5, 66, 0.005);
  Vector v = Vector::Zero(p.m());
  std::vector<double> values;
  for (int k = 0; k < 400; ++k) {
    values.push_back(reduced_f(p, v));
    v = normalized_sinkhorn_map(p, v);
  }
  for (int k = 0; k < 4000; ++k) v = normalized_sinkhorn_map(p, v);
  const double floor = reduced_f(p, v);

  // Least-squares slope of log(gap) over the usable tail.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  const double d0 = values.front() - floor;
  for (size_t k = 0; k < values.size(); ++k) {
    const double d = values[k] - floor;
    if (d <= 1e-13 * d0) break;
    const double x = static_cast<double>(k);
    const double y = std::log(d);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  REQUIRE(count >= 30);
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double ratio = std::exp(slope);
  CHECK(ratio < 0.95);
  CHECK(ratio > 0.0);
}

TEST_CASE("sinkhorn_solve convergence bookkeeping") {
  SolveConfig cfg;
  cfg.tol_l1 = 1e-8;
  cfg.wall_clock = false;

  SUBCASE("already optimal start converges without iterating") {
    SolveResult r = sinkhorn_solve(flat_2x2(), Vector::Zero(2), cfg);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.evaluations == 1);
    CHECK(r.final_violation <= 1e-15);
  }
  SUBCASE("skewed instance converges and reports a consistent result") {
    TransportProblem p = skewed_2x2();
    SolveResult r = sinkhorn_solve(p, Vector::Zero(2), cfg);
    CHECK(r.converged);
    CHECK(r.iterations >= 1);
    CHECK(r.evaluations == r.iterations + 1);
    CHECK(r.final_violation < cfg.tol_l1);
    CHECK(r.final_violation == doctest::Approx(grad_f(p, r.potentials.v).lpNorm<1>())
                                   .epsilon(1e-12));
    CHECK(r.final_reduced_f == doctest::Approx(reduced_f(p, r.potentials.v)).epsilon(1e-13));
    CHECK(std::abs(r.potentials.v.sum()) <= 1e-10);
    CHECK((r.potentials.u - row_solve(p, r.potentials.v)).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  SUBCASE("iteration cap reports failure honestly") {
    SolveConfig tight = cfg;
    tight.max_iters = 1;
    tight.tol_l1 = 1e-14;
    SolveResult r = sinkhorn_solve(skewed_2x2(), Vector::Zero(2), tight);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.final_violation > tight.tol_l1);
  }
  SUBCASE("off-gauge starts are projected first") {
    TransportProblem p = skewed_2x2();
    Vector v0(2);
    v0 << 1.0, 2.0;
    SolveResult shifted = sinkhorn_solve(p, v0, cfg);
    SolveResult centered = sinkhorn_solve(p, project_zero_sum(v0), cfg);
    CHECK((shifted.potentials.v - centered.potentials.v).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(shifted.iterations == centered.iterations);
  }
}

TEST_CASE("solve rejects invalid configurations") {
  SolveConfig cfg;
  cfg.tol_l1 = 0.0;
  CHECK_THROWS_AS(validate_solve_config(cfg), OtError);
  cfg.tol_l1 = 1e-6;
  cfg.max_iters = 0;
  CHECK_THROWS_AS(validate_solve_config(cfg), OtError);
  cfg.max_iters = 10;
  cfg.trace_stride = 0;
  CHECK_THROWS_AS(validate_solve_config(cfg), OtError);
  cfg.trace_stride = 1;
  validate_solve_config(cfg);
}

TEST_CASE("objective is monotone along the recorded trace") {
  SolveConfig cfg;
  cfg.tol_l1 = 1e-10;
  cfg.record_trace = true;
  cfg.wall_clock = false;
  SolveResult r = sinkhorn_solve(synthetic_rescaled(10, 10, 77, 0.3),
                                 Vector::Zero(10), cfg);
  REQUIRE(r.converged);
  REQUIRE(r.trace.records.size() >= 2);
  for (size_t k = 1; k < r.trace.records.size(); ++k) {
    CHECK(r.trace.records[k].reduced_f <= r.trace.records[k - 1].reduced_f + 1e-12);
    CHECK(r.trace.records[k].iter > r.trace.records[k - 1].iter);
  }
}

TEST_CASE("iterates stay on the zero-sum gauge") {
  TransportProblem p = synthetic_rescaled(6, 6, 88, 0.2);
  Vector v = Vector::Zero(p.m());
  for (int k = 0; k < 60; ++k) {
    v = normalized_sinkhorn_map(p, v);
    CHECK(std::abs(v.sum()) <= 1e-10);
  }
}

TEST_CASE("repeated solves are bitwise deterministic") {
  SolveConfig cfg;
  cfg.tol_l1 = 1e-9;
  cfg.record_trace = true;
  cfg.wall_clock = false;
  TransportProblem p = synthetic_rescaled(8, 5, 99, 0.4);
  SolveResult r1 = sinkhorn_solve(p, Vector::Zero(5), cfg);
  SolveResult r2 = sinkhorn_solve(p, Vector::Zero(5), cfg);
  CHECK((r1.potentials.v - r2.potentials.v).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((r1.potentials.u - r2.potentials.u).lpNorm<Eigen::Infinity>() == 0.0);
  std::ostringstream c1, c2;
  r1.trace.to_csv(c1);
  r2.trace.to_csv(c2);
  CHECK(c1.str() == c2.str());
  CHECK(c1.str().rfind(SolverTrace::csv_header(), 0) == 0);
}

TEST_CASE("extreme potentials keep the log step finite") {
  // The dense column mass of column 0 underflows to zero here, but the
  // logsumexp fallback recovers its log exactly: with v = (-600, 600) on
  // the skewed instance, u concentrates on column 1 and
  // log c_0 = lse_i(u_i + v_0 - C_i0) stays a perfectly ordinary number,
  // so one step lifts v_0 right back up instead of throwing.
  TransportProblem p = skewed_2x2();
  Vector v(2);
  v << -600.0, 600.0;
  const Vector u = row_solve(p, v);
  const Vector g = grad_f(p, v);
  CHECK(g[0] == -0.5);  // dense column sum is an exact zero
  const Vector next = sinkhorn_v_step(p, v);
  REQUIRE(next.allFinite());
  // direct scalar logsumexp of the dead column
  const double e0 = u[0] + v[0] - p.C(0, 0);
  const double e1 = u[1] + v[0] - p.C(1, 0);
  const double top = std::max(e0, e1);
  const double col_log = top + std::log(std::exp(e0 - top) + std::exp(e1 - top));
  CHECK(next[0] == doctest::Approx(v[0] + std::log(p.b[0]) - col_log).epsilon(1e-15));
  CHECK(next[0] > 500.0);  // the dead column is lifted back in one move
}

}  // TEST_SUITE
