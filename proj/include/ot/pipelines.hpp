#pragma once

#include <optional>

#include "ot/accel.hpp"
#include "ot/data.hpp"

namespace ot {

enum class SolverKind { Sinkhorn, Acc, AccHomotopy };

const char* solver_kind_name(SolverKind k);
SolverKind solver_kind_from_name(const std::string& name);

// Everything the pipelines need to know about how to solve one instance.
struct SolverSpec {
  SolverKind kind = SolverKind::AccHomotopy;
  double mu = 0.5;          // fixed-mu accelerated solve only
  double mu0 = 0.5;         // homotopy schedule start
  long m0 = 4;
  long max_iters = 2000000; // inner-iteration cap for every solver
  bool record_trace = false;
  long trace_stride = 1;
  bool wall_clock = true;
};

// Dispatches to sinkhorn_solve / acc_solve / homotopy_solve on the
// rescaled instance, from v0 = 0, with the given stopping tolerance.
SolveResult run_solver(const TransportProblem& rescaled, const SolverSpec& spec,
                       double tol_l1);

// Color j of the output is the plan-weighted average of source colors:
//   out_j = sum_i P_ij src_i / c_j,  c_j = sum_i P_ij.
// src_colors is n x 3, the result m x 3. Throws DegenerateColumn if some
// c_j underflows to zero.
Matrix barycentric_projection(const PlanDense& plan, const Matrix& src_colors);

// Paints every pixel of `target` with the transferred color of its nearest
// sampled color (plain RGB distance, ties to the lowest sample index),
// clipping to [0, 1] before quantization.
Image nn_propagate(const Image& target, const Matrix& sampled_tgt_colors,
                   const Matrix& transferred);

// Row argmax per source sample, ties to the lowest column index.
std::vector<int> predict_translations(const PlanDense& plan);

// Fraction of dictionary source words whose row ranks some correct target
// inside the k largest plan entries (value descending, index ascending).
// Multiple entries for one source count once, satisfied by any of its
// targets. Empty dictionary reports nullopt.
std::optional<double> topk_accuracy(const PlanDense& plan,
                                    const BilingualDictionary& dict, int k);

struct TransferConfig {
  int n_samples = 1000;
  double eps = 1e-2;
  std::uint64_t seed = 1;
  SolverSpec solver;
  // Negative means the transfer default 2 / n.
  double tol_l1 = -1.0;
};

struct TransferResult {
  Image output;
  SolveResult solve;
  Matrix transferred;        // n_samples x 3 barycentric colors
  double eps = 0.0;
  double tol_l1 = 0.0;
  double cost_raw_max = 0.0; // normalization scale of the sampled cost
};

// Palette transfer: sample both images, squared-Euclidean cost on RGB,
// uniform marginals, solve, project, propagate over the full target image.
TransferResult run_color_transfer(const Image& src, const Image& tgt,
                                  const TransferConfig& cfg);

struct AlignmentConfig {
  double eps = 1e-2;
  SolverSpec solver;
  // Negative means the alignment default 0.01 * 2 / n.
  double tol_l1 = -1.0;
  CosineNormalization cost_norm = CosineNormalization::MinMax;
};

struct AlignmentReport {
  std::optional<double> top1;
  std::optional<double> top5;
  SolveResult solve;
  int n = 0;
  int dictionary_pairs = 0;
  int evaluated_pairs = 0;  // distinct source words scored; <= dictionary_pairs
  double eps = 0.0;
  double tol_l1 = 0.0;
  double cost_raw_min = 0.0;
  double cost_raw_max = 0.0;
};

// Translation retrieval: cosine cost between the two vocabularies,
// uniform marginals, solve, score top-1 / top-5 against the dictionary.
AlignmentReport run_word_alignment(const WordVectors& src, const WordVectors& tgt,
                                   const BilingualDictionary& dict,
                                   const AlignmentConfig& cfg);

}  // namespace ot
