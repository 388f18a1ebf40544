#pragma once

// Shared data model for noisy sparse subspace clustering.
//
// Samples are stored column-major throughout: a data matrix X is n x N and
// column j is sample x_j.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  ZeroColumn,
  DimensionMismatch,
  InvalidInput,
  NonFinite,
  CholeskyFailure,
  DegenerateDictionary,
  RankDeficient,
  DegenerateDual,
  MissingCleanData,
  InvalidSpec,
  EigenFailure,
  LabelRangeMismatch,
  IoError,
  ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr double kZeroColumnThreshold = 1e-12;
inline constexpr double kOrthonormalTolerance = 1e-10;

/// Ambient-space sample matrix. Invariants: n >= 1, N >= 2, all entries finite.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  Eigen::Index ambient_dim() const { return values_.rows(); }
  Eigen::Index num_samples() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  auto column(Eigen::Index j) const { return values_.col(j); }

 private:
  Matrix values_;
};

/// Union-of-subspaces ground truth: one orthonormal basis U_l (n x d_l) per
/// subspace.
class SubspaceEnsemble {
 public:
  explicit SubspaceEnsemble(std::vector<Matrix> bases);

  std::size_t size() const { return bases_.size(); }
  Eigen::Index ambient_dim() const { return bases_.front().rows(); }
  const Matrix& basis(std::size_t l) const { return bases_.at(l); }
  const std::vector<Matrix>& bases() const { return bases_; }
  std::vector<int> dims() const;

 private:
  std::vector<Matrix> bases_;
};

struct LabeledDataset {
  DataMatrix data;
  std::vector<int> labels;
  std::optional<DataMatrix> clean;
  std::optional<SubspaceEnsemble> ensemble;

  /// Throws InvalidInput when labels/shapes are inconsistent.
  void validate() const;
  int num_subspaces() const;
  std::vector<Eigen::Index> members(int label) const;
};

/// Self-expression matrix C (N x N) with exactly zero diagonal.
class CoefficientMatrix {
 public:
  explicit CoefficientMatrix(Matrix values);

  Eigen::Index size() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  auto column(Eigen::Index j) const { return values_.col(j); }

 private:
  Matrix values_;
};

/// Scales every column to unit Euclidean norm. Throws ZeroColumn when a column
/// has norm <= 1e-12.
DataMatrix normalize_columns(const DataMatrix& m);
Matrix normalize_columns(const Matrix& m);

/// P_S v = U U^T v for an orthonormal basis U.
Vector project_onto(const Matrix& basis, const Vector& v);

/// sign(x) * max(|x| - t, 0)
inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

/// Modified Gram-Schmidt, run twice for orthogonality to machine precision.
/// Throws RankDeficient if the columns are linearly dependent.
Matrix orthonormalize(const Matrix& m);

/// max |U^T U - I|
double orthonormality_error(const Matrix& basis);

bool all_finite(const Matrix& m);

}  // namespace ssc
