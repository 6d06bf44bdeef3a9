#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ot/core.hpp"
#include "ot/image.hpp"

namespace ot {

// Rows are samples.
struct PointCloud {
  Matrix points;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

// Vocabulary with one unit-norm embedding per row.
struct WordVectors {
  std::vector<std::string> words;
  Matrix vectors;
};

// Index pairs (source word, target word), file order, deduplicated.
struct BilingualDictionary {
  std::vector<std::pair<int, int>> pairs;
};

// Random instance: marginal entries and cost entries are drawn U[0, 1)
// from one xoshiro256++ stream seeded with `seed`, in the fixed order
// a (n draws), b (m draws), C row-major (n * m draws). a and b are then
// normalized to sum 1 and C to total sum 1. epsilon is left at 1; callers
// set the strength they want before rescaling.
TransportProblem synthetic_instance(Eigen::Index n, Eigen::Index m, std::uint64_t seed);

// Stamps a regularization strength onto an instance built at epsilon 1.
TransportProblem with_epsilon(TransportProblem p, double epsilon);

// n distinct pixels drawn uniformly without replacement (partial
// Fisher-Yates over the flat pixel index, one next_below call per slot).
// colors holds the selected RGB values scaled to [0, 1].
struct SampledPixels {
  PointCloud colors;          // n x 3
  std::vector<int> indices;   // flat pixel indices, selection order
};

SampledPixels sample_pixels(const Image& img, int n, std::uint64_t seed);

// Cost matrix plus the raw range it was normalized from.
struct CostMatrix {
  Matrix C;
  double raw_min = 0.0;
  double raw_max = 0.0;
};

// Squared Euclidean distances divided by their maximum (left unscaled if
// the maximum is zero).
CostMatrix cost_sqeuclidean(const PointCloud& x, const PointCloud& y);

// 1 - <x_i, y_j> on unit vectors. MinMax maps the observed range onto
// [0, 1] (constant matrices collapse to zero); HalfRange just divides the
// raw values by 2.
enum class CosineNormalization { MinMax, HalfRange };

CostMatrix cost_cosine(const Matrix& x_unit, const Matrix& y_unit,
                       CosineNormalization norm = CosineNormalization::MinMax);

// Text embedding file: header "count dim", then one word and dim floats
// per line. Reads the first n distinct words in file order, skipping
// duplicates with a warning on stderr, and scales each vector to unit
// norm. Throws MalformedLine / VocabularyTooSmall / ZeroVector.
WordVectors load_word_vectors(const std::string& path, int n);

// Two whitespace-separated words per line. Pairs whose words are missing
// from either vocabulary are dropped; surviving pairs are deduplicated
// keeping first occurrence.
BilingualDictionary load_dictionary(const std::string& path,
                                    const WordVectors& src,
                                    const WordVectors& tgt);

// Flat CSV fixture format, header "name,index,value": one row per scalar,
// names n / m / epsilon / a / b / C with C flattened row-major. Values are
// serialized with %.17g so instances round-trip exactly.
void write_instance_csv(const std::string& path, const TransportProblem& p);
TransportProblem read_instance_csv(const std::string& path);

}  // namespace ot
