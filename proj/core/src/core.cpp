#include "ssc/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ssc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::DegenerateDictionary: return "DegenerateDictionary";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateDual: return "DegenerateDual";
    case ErrorCode::MissingCleanData: return "MissingCleanData";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::LabelRangeMismatch: return "LabelRangeMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

bool all_finite(const Matrix& m) { return m.allFinite(); }

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 2) {
    throw Error(ErrorCode::InvalidInput,
                "data matrix needs n >= 1 and N >= 2, got " + std::to_string(values_.rows()) +
                    "x" + std::to_string(values_.cols()));
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::NonFinite, "data matrix has non-finite entries");
  }
}

SubspaceEnsemble::SubspaceEnsemble(std::vector<Matrix> bases) : bases_(std::move(bases)) {
  if (bases_.empty()) throw Error(ErrorCode::InvalidInput, "ensemble needs at least one subspace");
  const auto n = bases_.front().rows();
  for (const auto& u : bases_) {
    if (u.rows() != n) throw Error(ErrorCode::DimensionMismatch, "bases differ in ambient dimension");
    if (u.cols() < 1 || u.cols() >= n) {
      throw Error(ErrorCode::InvalidInput, "subspace dimension must satisfy 1 <= d < n");
    }
    if (orthonormality_error(u) > kOrthonormalTolerance) {
      throw Error(ErrorCode::InvalidInput, "basis is not orthonormal");
    }
  }
}

std::vector<int> SubspaceEnsemble::dims() const {
  std::vector<int> d;
  d.reserve(bases_.size());
  for (const auto& u : bases_) d.push_back(static_cast<int>(u.cols()));
  return d;
}

void LabeledDataset::validate() const {
  const auto N = data.num_samples();
  if (static_cast<Eigen::Index>(labels.size()) != N) {
    throw Error(ErrorCode::InvalidInput, "labels length differs from sample count");
  }
  for (int l : labels) {
    if (l < 0) throw Error(ErrorCode::InvalidInput, "negative label");
  }
  if (clean && (clean->ambient_dim() != data.ambient_dim() || clean->num_samples() != N)) {
    throw Error(ErrorCode::DimensionMismatch, "clean data shape differs from noisy data");
  }
  if (ensemble) {
    if (ensemble->ambient_dim() != data.ambient_dim()) {
      throw Error(ErrorCode::DimensionMismatch, "ensemble ambient dimension differs from data");
    }
    for (int l : labels) {
      if (l >= static_cast<int>(ensemble->size())) {
        throw Error(ErrorCode::InvalidInput, "label exceeds number of subspaces");
      }
    }
  }
}

int LabeledDataset::num_subspaces() const {
  if (ensemble) return static_cast<int>(ensemble->size());
  int mx = -1;
  for (int l : labels) mx = std::max(mx, l);
  return mx + 1;
}

std::vector<Eigen::Index> LabeledDataset::members(int label) const {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) idx.push_back(static_cast<Eigen::Index>(i));
  }
  return idx;
}

CoefficientMatrix::CoefficientMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient matrix must be square");
  }
  if (!values_.allFinite()) throw Error(ErrorCode::NonFinite, "coefficient matrix has non-finite entries");
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    if (values_(i, i) != 0.0) {
      throw Error(ErrorCode::InvalidInput, "coefficient matrix diagonal must be exactly zero");
    }
  }
}

Matrix normalize_columns(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (!(norm > kZeroColumnThreshold)) {
      throw Error(ErrorCode::ZeroColumn, "column " + std::to_string(j) + " has norm " +
                                             std::to_string(norm));
    }
    out.col(j) /= norm;
  }
  return out;
}

DataMatrix normalize_columns(const DataMatrix& m) { return DataMatrix(normalize_columns(m.values())); }

Vector project_onto(const Matrix& basis, const Vector& v) {
  if (basis.rows() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch, "basis has " + std::to_string(basis.rows()) +
                                                  " rows but vector has " +
                                                  std::to_string(v.size()) + " entries");
  }
  return basis * (basis.transpose() * v);
}

Matrix orthonormalize(const Matrix& m) {
  Matrix q = m;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
      for (Eigen::Index j = 0; j < k; ++j) {
        q.col(k) -= q.col(j).dot(q.col(k)) * q.col(j);
      }
      const double norm = q.col(k).norm();
      if (norm <= 1e-12 * scale) {
        throw Error(ErrorCode::RankDeficient, "columns are linearly dependent");
      }
      q.col(k) /= norm;
    }
  }
  return q;
}

double orthonormality_error(const Matrix& basis) {
  const Matrix gram = basis.transpose() * basis;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace ssc
