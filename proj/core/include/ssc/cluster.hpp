#pragma once

// Affinity construction, spectral clustering and the success metrics used to
// score a coefficient matrix against ground-truth labels.

#include "ssc/core.hpp"
#include "ssc/rng.hpp"

#include <cstddef>
#include <vector>

namespace ssc::cluster {

/// Symmetric, non-negative, zero-diagonal N x N weight matrix.
class AffinityGraph {
 public:
  explicit AffinityGraph(Matrix w);
  const Matrix& weights() const { return w_; }
  Eigen::Index size() const { return w_.rows(); }

 private:
  Matrix w_;
};

/// W = |C| + |C|^T
AffinityGraph build_affinity(const CoefficientMatrix& c);

struct SpectralOptions {
  int restarts = 10;
  int max_iter = 300;
  /// Degree floor for isolated vertices.
  double degree_floor = 1e-12;
};

struct SpectralResult {
  std::vector<int> assignments;
  /// True when the graph carries no weight at all (assignments are arbitrary).
  bool degenerate = false;
  Vector eigenvalues;
};

/// Normalized spectral clustering: L_sym = I - D^{-1/2} W D^{-1/2}, the L
/// eigenvectors of smallest eigenvalue, row normalization, then seeded
/// k-means++ with restarts. Throws InvalidInput unless 2 <= L <= N and
/// EigenFailure if the eigensolver does not converge.
SpectralResult spectral_cluster(const AffinityGraph& w, int num_clusters, const RngSpec& rng,
                                const SpectralOptions& opts = {});

/// I - D^{-1/2} W D^{-1/2} with the degree floor applied.
Matrix normalized_laplacian(const AffinityGraph& w, double degree_floor = 1e-12);

struct KMeansResult {
  std::vector<int> assignments;
  double inertia = 0.0;
};

/// Seeded k-means++ on the rows of `points`, best of `restarts`.
KMeansResult kmeans(const Matrix& points, int k, const RngSpec& rng, int restarts = 10, int max_iter = 300);

/// Entries with |C_ij| <= support_eps(column j) are zeroed.
Matrix threshold_coefficients(const Matrix& c, double support_rel = 1e-6);

struct RelViolation {
  double value = 0.0;
  /// Denominator (in-mask mass) is zero; value is +inf (or 0 when C = 0).
  bool all_zero_mass = false;
};

/// sum_{(i,j) not in M} |C_ij| / sum_{(i,j) in M} |C_ij| after sub-threshold
/// cleanup; M = same-label pairs.
RelViolation rel_violation(const CoefficientMatrix& c, const std::vector<int>& labels,
                           double support_rel = 1e-6);

struct SepCheck {
  bool sep_holds = false;
  std::size_t trivial_columns = 0;
};

/// Detection property: no trivial column and every above-threshold entry
/// links same-label samples.
SepCheck check_sep_and_trivial(const CoefficientMatrix& c, const std::vector<int>& labels,
                               double support_rel = 1e-6);

/// Best agreement over label permutations: exhaustive for L <= 8, Hungarian
/// assignment on the confusion matrix otherwise. Throws LabelRangeMismatch.
double clustering_accuracy(const std::vector<int>& assignments, const std::vector<int>& truth, int num_labels);

/// Minimum-cost perfect matching on a square cost matrix; returns the column
/// assigned to each row.
std::vector<int> hungarian(const Matrix& cost);

struct ClusterResult {
  std::vector<int> assignments;
  double accuracy = 0.0;
  double rel_violation = 0.0;
  bool all_zero_mass = false;
  bool sep_holds = false;
  std::size_t trivial_columns = 0;
  bool degenerate = false;
};

/// Affinity + spectral clustering + metrics for one coefficient matrix.
ClusterResult evaluate(const CoefficientMatrix& c, const std::vector<int>& truth, int num_clusters,
                       const RngSpec& rng, double support_rel = 1e-6, const SpectralOptions& opts = {});

}  // namespace ssc::cluster
