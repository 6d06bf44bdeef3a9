#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace ot {

// Dense row-major matrix. Cost matrices are traversed row by row in the
// solver hot loop, so row-major keeps those sweeps contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Any exponent above this is treated as an overflow instead of producing inf.
inline constexpr double kExpOverflowBound = 700.0;

// Gradients below this sup-norm are considered numerically zero by the
// diagnostics that divide by gradient-dependent quantities.
inline constexpr double kGradFloor = 1e-12;

struct OtError : std::runtime_error {
  explicit OtError(const std::string& what) : std::runtime_error(what) {}
};

// A log-domain exponent exceeded kExpOverflowBound.
struct PotentialOverflow : OtError {
  explicit PotentialOverflow(const std::string& what) : OtError(what) {}
};

// An argument left the domain of the convex conjugate (xi_j <= -b_j).
struct DomainViolation : OtError {
  explicit DomainViolation(const std::string& what) : OtError(what) {}
};

// A vector that must be zero-sum was not.
struct GaugeViolation : OtError {
  explicit GaugeViolation(const std::string& what) : OtError(what) {}
};

// Marginals must be strictly positive probability vectors.
struct InvalidMarginals : OtError {
  explicit InvalidMarginals(const std::string& what) : OtError(what) {}
};

// A plan entry that must be strictly positive was zero or negative.
struct NonPositiveEntry : OtError {
  explicit NonPositiveEntry(const std::string& what) : OtError(what) {}
};

struct DimensionMismatch : OtError {
  explicit DimensionMismatch(const std::string& what) : OtError(what) {}
};

// A dense diagnostic was requested on a problem too large for it.
struct DimensionTooLarge : OtError {
  explicit DimensionTooLarge(const std::string& what) : OtError(what) {}
};

// The exact-solver fallback only covers tiny instances; anything else
// has no ground truth available.
struct OracleUnavailable : OtError {
  explicit OracleUnavailable(const std::string& what) : OtError(what) {}
};

// A transport-plan column summed to zero, so a barycenter is undefined.
struct DegenerateColumn : OtError {
  explicit DegenerateColumn(const std::string& what) : OtError(what) {}
};

// Parsing errors for on-disk formats (vectors, dictionaries, instances).
struct MalformedLine : OtError {
  explicit MalformedLine(const std::string& what) : OtError(what) {}
};

struct VocabularyTooSmall : OtError {
  explicit VocabularyTooSmall(const std::string& what) : OtError(what) {}
};

struct ZeroVector : OtError {
  explicit ZeroVector(const std::string& what) : OtError(what) {}
};

struct ImageTooSmall : OtError {
  explicit ImageTooSmall(const std::string& what) : OtError(what) {}
};

struct IoError : OtError {
  explicit IoError(const std::string& what) : OtError(what) {}
};

}  // namespace ot
