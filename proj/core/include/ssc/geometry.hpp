#pragma once

// Geometric quantities behind the noisy SSC guarantees: inradius of the
// symmetrized convex hull of a subspace's samples, circumradius of its polar,
// projected dual directions, projected subspace incoherence, subspace affinity
// and noise magnitudes.

#include "ssc/core.hpp"
#include "ssc/rng.hpp"
#include "ssc/solver.hpp"

#include <vector>

namespace ssc::geometry {

struct InradiusOptions {
  /// Random unit directions sampled when d >= 3.
  int budget = 20000;
  /// Coordinate-descent refinement steps on the best sampled direction
  /// (d >= 3). For d == 2 any positive value enables a golden-section search
  /// within one grid step of the best angle; 0 disables refinement.
  int refine_steps = 50;
  /// Angle grid resolution for d == 2.
  int angle_grid = 100000;
  /// Leave-one-out: number of smallest candidates that get refined.
  int refine_candidates = 5;
};

/// min over unit w in span(basis) of ||points^T w||_inf, i.e. the inradius of
/// conv(+-points) inside the subspace. Exact for d = 1, a dense angle grid for
/// d = 2 refined around its best angle, sampled directions plus local
/// refinement for d >= 3. For d >= 2 the
/// estimate is an upper bound of the true inradius.
///
/// Throws DimensionMismatch / InvalidInput if the points are not in the span
/// (tolerance 1e-8), RankDeficient if they do not span it.
double estimate_inradius(const Matrix& points, const Matrix& basis, const RngSpec& rng,
                         const InradiusOptions& opts = {});

/// r(Q_{-i}) for every column i (the inradius with column i removed), using one
/// shared set of directions.
std::vector<double> leave_one_out_inradius(const Matrix& points, const Matrix& basis,
                                           const RngSpec& rng, const InradiusOptions& opts = {});

/// 1 / estimate_inradius: circumradius of the polar set, via r(P) R(P^o) = 1.
double circumradius_polar(const Matrix& points, const Matrix& basis, const RngSpec& rng,
                          const InradiusOptions& opts = {});

/// v = P_S nu / ||P_S nu|| with nu = lambda (x - A c) from the LASSO solve.
/// Throws DegenerateDual if ||P_S nu|| <= 1e-10.
Vector projected_dual_direction(const Vector& x, const Matrix& dictionary, const Matrix& basis,
                                const solver::SolveConfig& cfg);

struct IncoherenceResult {
  std::vector<double> mu;
  /// Columns whose dual direction was degenerate (skipped).
  std::size_t skipped_columns = 0;
  /// True when noisy X stood in for missing clean points.
  bool proxy = false;
};

/// mu_l = max over y outside subspace l of ||V_l^T y||_inf, with the dual
/// directions computed against X^{(l)}_{-i} (within-subspace dictionary).
/// External points are the clean samples; when clean data is absent the noisy
/// samples are used and `proxy` is set. Requires the ensemble and L >= 2.
IncoherenceResult subspace_incoherence(const LabeledDataset& dataset, const solver::SolveConfig& cfg);

/// ||U_k^T U_l||_F
double subspace_affinity(const Matrix& u_k, const Matrix& u_l);

/// Cosines of the canonical angles (singular values of U_k^T U_l).
Vector canonical_cosines(const Matrix& u_k, const Matrix& u_l);

struct NoiseMagnitudes {
  double delta = 0.0;
  double delta1 = 0.0;
};

/// delta = max_i ||x_i - y_i||, delta1 = max_{i,l} ||P_{S_l}(x_i - y_i)||.
/// Throws MissingCleanData without clean data and ensemble.
NoiseMagnitudes noise_magnitudes(const LabeledDataset& dataset);

struct GeometryReport {
  std::vector<double> r;
  double r_min = 0.0;
  std::vector<double> mu;
  double delta = 0.0;
  double delta1 = 0.0;
  Matrix affinity;
  std::size_t skipped_columns = 0;
  std::vector<int> dims;
  double lambda = 0.0;
  bool mu_proxy = false;
  /// The inradius estimator is one-sided (upper bound) for d >= 2.
  bool inradius_upper_bound = true;
};

/// r_l = min_i r(Q^{(l)}_{-i}) from the clean samples (or noisy samples when
/// clean data is absent), mu_l at cfg.lambda, delta/delta1 when clean data is
/// present (NaN otherwise), pairwise affinities.
GeometryReport analyze(const LabeledDataset& dataset, const solver::SolveConfig& cfg, const RngSpec& rng,
                       const InradiusOptions& opts = {});

}  // namespace ssc::geometry
