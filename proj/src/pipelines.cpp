#include "ot/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <fmt/core.h>

namespace ot {

const char* solver_kind_name(SolverKind k) {
  switch (k) {
    case SolverKind::Sinkhorn: return "sinkhorn";
    case SolverKind::Acc: return "acc";
    case SolverKind::AccHomotopy: return "acc-homotopy";
  }
  return "unknown";
}

SolverKind solver_kind_from_name(const std::string& name) {
  if (name == "sinkhorn") return SolverKind::Sinkhorn;
  if (name == "acc") return SolverKind::Acc;
  if (name == "acc-homotopy") return SolverKind::AccHomotopy;
  throw OtError(fmt::format("unknown solver '{}'", name));
}

SolveResult run_solver(const TransportProblem& rescaled, const SolverSpec& spec,
                       double tol_l1) {
  SolveConfig cfg;
  cfg.tol_l1 = tol_l1;
  cfg.max_iters = spec.max_iters;
  cfg.record_trace = spec.record_trace;
  cfg.trace_stride = spec.trace_stride;
  cfg.wall_clock = spec.wall_clock;
  const Vector v0 = Vector::Zero(rescaled.m());

  switch (spec.kind) {
    case SolverKind::Sinkhorn:
      return sinkhorn_solve(rescaled, v0, cfg);
    case SolverKind::Acc:
      return acc_solve(rescaled, v0, spec.mu, cfg);
    case SolverKind::AccHomotopy: {
      HomotopyConfig h;
      h.mu0 = spec.mu0;
      h.m0 = spec.m0;
      h.tol_l1 = tol_l1;
      h.max_total_inner = spec.max_iters;
      h.record_trace = spec.record_trace;
      h.trace_stride = spec.trace_stride;
      h.wall_clock = spec.wall_clock;
      return homotopy_solve(rescaled, h);
    }
  }
  throw OtError("unreachable solver kind");
}

Matrix barycentric_projection(const PlanDense& plan, const Matrix& src_colors) {
  if (plan.P.rows() != src_colors.rows()) {
    throw DimensionMismatch("plan rows and source colors disagree");
  }
  const Vector& col = plan.col_sums;
  for (Eigen::Index j = 0; j < col.size(); ++j) {
    if (!(col[j] > 0.0)) {
      throw DegenerateColumn(fmt::format("plan column {} has zero mass", j));
    }
  }
  Matrix out = plan.P.transpose() * src_colors;
  out.array().colwise() /= col.array();
  return out;
}

Image nn_propagate(const Image& target, const Matrix& sampled_tgt_colors,
                   const Matrix& transferred) {
  if (sampled_tgt_colors.rows() != transferred.rows() || sampled_tgt_colors.cols() != 3 ||
      transferred.cols() != 3) {
    throw DimensionMismatch("sampled colors and transferred colors disagree");
  }
  const Eigen::Index ns = sampled_tgt_colors.rows();
  Image out = target;
  for (int pix = 0; pix < target.pixel_count(); ++pix) {
    const std::uint8_t* c8 = target.px(pix);
    Eigen::RowVector3d c(c8[0] / 255.0, c8[1] / 255.0, c8[2] / 255.0);
    Eigen::Index best = 0;
    double best_d2 = (c - sampled_tgt_colors.row(0)).squaredNorm();
    for (Eigen::Index s = 1; s < ns; ++s) {
      const double d2 = (c - sampled_tgt_colors.row(s)).squaredNorm();
      if (d2 < best_d2) {  // strict, so ties resolve to the lowest index
        best_d2 = d2;
        best = s;
      }
    }
    for (int ch = 0; ch < 3; ++ch) {
      const double value = std::clamp(transferred(best, ch), 0.0, 1.0);
      out.px(pix)[ch] = static_cast<std::uint8_t>(std::lround(value * 255.0));
    }
  }
  return out;
}

std::vector<int> predict_translations(const PlanDense& plan) {
  std::vector<int> out(static_cast<size_t>(plan.P.rows()));
  for (Eigen::Index i = 0; i < plan.P.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < plan.P.cols(); ++j) {
      if (plan.P(i, j) > plan.P(i, best)) best = j;
    }
    out[static_cast<size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

std::optional<double> topk_accuracy(const PlanDense& plan, const BilingualDictionary& dict,
                                    int k) {
  if (k < 1) throw OtError("topk_accuracy needs k >= 1");
  if (dict.pairs.empty()) return std::nullopt;

  std::unordered_map<int, std::unordered_set<int>> targets;
  for (const auto& [s, t] : dict.pairs) {
    if (s < 0 || s >= plan.P.rows() || t < 0 || t >= plan.P.cols()) {
      throw DimensionMismatch("dictionary index outside the plan");
    }
    targets[s].insert(t);
  }

  std::vector<int> order(static_cast<size_t>(plan.P.cols()));
  long correct = 0;
  for (const auto& [s, want] : targets) {
    for (size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
    const auto kk = std::min<size_t>(static_cast<size_t>(k), order.size());
    // Value descending, index ascending on ties: a deterministic top-k.
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(kk), order.end(),
                      [&](int x, int y) {
                        const double px = plan.P(s, x), py = plan.P(s, y);
                        return px > py || (px == py && x < y);
                      });
    for (size_t j = 0; j < kk; ++j) {
      if (want.count(order[j])) {
        ++correct;
        break;
      }
    }
  }
  return static_cast<double>(correct) / static_cast<double>(targets.size());
}

TransferResult run_color_transfer(const Image& src, const Image& tgt,
                                  const TransferConfig& cfg) {
  // The same seed on both sides keeps equal images sampling equal pixels.
  const SampledPixels sp = sample_pixels(src, cfg.n_samples, cfg.seed);
  const SampledPixels tp = sample_pixels(tgt, cfg.n_samples, cfg.seed);
  const CostMatrix cost = cost_sqeuclidean(sp.colors, tp.colors);

  const auto n = static_cast<Eigen::Index>(cfg.n_samples);
  const Vector uniform = Vector::Constant(n, 1.0 / static_cast<double>(n));
  TransportProblem prob = make_problem(uniform, uniform, cost.C, cfg.eps);
  const TransportProblem rescaled = rescale_problem(prob);

  TransferResult out;
  out.eps = cfg.eps;
  out.tol_l1 = cfg.tol_l1 < 0.0 ? 2.0 / static_cast<double>(n) : cfg.tol_l1;
  out.cost_raw_max = cost.raw_max;
  out.solve = run_solver(rescaled, cfg.solver, out.tol_l1);
  const PlanDense plan = plan_from_potentials(rescaled, out.solve.potentials);
  out.transferred = barycentric_projection(plan, sp.colors.points);
  out.output = nn_propagate(tgt, tp.colors.points, out.transferred);
  return out;
}

AlignmentReport run_word_alignment(const WordVectors& src, const WordVectors& tgt,
                                   const BilingualDictionary& dict,
                                   const AlignmentConfig& cfg) {
  if (src.vectors.rows() != tgt.vectors.rows()) {
    throw DimensionMismatch("vocabularies must have equal size for uniform marginals");
  }
  const Eigen::Index n = src.vectors.rows();
  const CostMatrix cost = cost_cosine(src.vectors, tgt.vectors, cfg.cost_norm);
  const Vector uniform = Vector::Constant(n, 1.0 / static_cast<double>(n));
  TransportProblem prob = make_problem(uniform, uniform, cost.C, cfg.eps);
  const TransportProblem rescaled = rescale_problem(prob);

  AlignmentReport out;
  out.n = static_cast<int>(n);
  out.dictionary_pairs = static_cast<int>(dict.pairs.size());
  {
    std::unordered_set<int> sources;
    for (const auto& pr : dict.pairs) sources.insert(pr.first);
    out.evaluated_pairs = static_cast<int>(sources.size());
  }
  out.eps = cfg.eps;
  out.tol_l1 = cfg.tol_l1 < 0.0 ? 0.01 * 2.0 / static_cast<double>(n) : cfg.tol_l1;
  out.cost_raw_min = cost.raw_min;
  out.cost_raw_max = cost.raw_max;
  out.solve = run_solver(rescaled, cfg.solver, out.tol_l1);
  const PlanDense plan = plan_from_potentials(rescaled, out.solve.potentials);
  out.top1 = topk_accuracy(plan, dict, 1);
  out.top5 = topk_accuracy(plan, dict, 5);
  return out;
}

}  // namespace ot
