#include "ssc/cluster.hpp"

#include "ssc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ssc::cluster {

AffinityGraph::AffinityGraph(Matrix w) : w_(std::move(w)) {
  if (w_.rows() != w_.cols()) throw Error(ErrorCode::DimensionMismatch, "affinity must be square");
  for (Eigen::Index i = 0; i < w_.rows(); ++i) {
    if (w_(i, i) != 0.0) throw Error(ErrorCode::InvalidInput, "affinity diagonal must be zero");
    for (Eigen::Index j = 0; j < w_.cols(); ++j) {
      if (!(w_(i, j) >= 0.0)) throw Error(ErrorCode::InvalidInput, "affinity entries must be >= 0");
      if (w_(i, j) != w_(j, i)) throw Error(ErrorCode::InvalidInput, "affinity must be symmetric");
    }
  }
}

AffinityGraph build_affinity(const CoefficientMatrix& c) {
  const Matrix a = c.values().cwiseAbs();
  Matrix w = a + a.transpose();
  w.diagonal().setZero();
  return AffinityGraph(std::move(w));
}

Matrix normalized_laplacian(const AffinityGraph& w, double degree_floor) {
  const Eigen::Index n = w.size();
  Vector deg = w.weights().rowwise().sum();
  Vector inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(std::max(deg[i], degree_floor));
  Matrix lap = -(inv_sqrt.asDiagonal() * w.weights() * inv_sqrt.asDiagonal());
  lap.diagonal().array() += 1.0;
  return lap;
}

namespace {

double sq_dist(const Matrix& points, Eigen::Index i, const Matrix& centers, Eigen::Index c) {
  return (points.row(i) - centers.row(c)).squaredNorm();
}

KMeansResult kmeans_once(const Matrix& points, int k, Rng& rng, int max_iter) {
  const Eigen::Index n = points.rows();
  Matrix centers(k, points.cols());

  // k-means++ seeding
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector best(n);
  for (Eigen::Index i = 0; i < n; ++i) best[i] = sq_dist(points, i, centers, 0);
  for (int c = 1; c < k; ++c) {
    const double total = best.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= best[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) best[i] = std::min(best[i], sq_dist(points, i, centers, c));
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int arg = 0;
      double dist = sq_dist(points, i, centers, 0);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points, i, centers, c);
        if (d < dist) {
          dist = d;
          arg = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != arg) {
        assign[static_cast<std::size_t>(i)] = arg;
        changed = true;
      }
    }
    if (!changed && it > 0) break;

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
      ++sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / sizes[static_cast<std::size_t>(c)];
      } else {
        // empty cluster: move it to the point farthest from its center
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d = sq_dist(points, i, centers, assign[static_cast<std::size_t>(i)]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers.row(c) = points.row(far);
      }
    }
  }

  KMeansResult out;
  out.assignments = std::move(assign);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.inertia += sq_dist(points, i, centers, out.assignments[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, const RngSpec& rng, int restarts, int max_iter) {
  if (k < 1 || points.rows() < k) throw Error(ErrorCode::InvalidInput, "k-means needs 1 <= k <= number of points");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    Rng gen(rng.child(static_cast<std::uint64_t>(r)));
    auto res = kmeans_once(points, k, gen, max_iter);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

SpectralResult spectral_cluster(const AffinityGraph& w, int num_clusters, const RngSpec& rng,
                                const SpectralOptions& opts) {
  const Eigen::Index n = w.size();
  if (num_clusters < 2 || num_clusters > n) {
    throw Error(ErrorCode::InvalidInput, "spectral clustering needs 2 <= L <= N");
  }
  SpectralResult out;
  out.degenerate = !(w.weights().sum() > 0.0);

  const Matrix lap = normalized_laplacian(w, opts.degree_floor);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(lap);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigensolver did not converge");
  out.eigenvalues = eig.eigenvalues();

  Matrix embed = eig.eigenvectors().leftCols(num_clusters);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 1e-12) embed.row(i) /= norm;
  }
  out.assignments = kmeans(embed, num_clusters, rng, opts.restarts, opts.max_iter).assignments;
  return out;
}

Matrix threshold_coefficients(const Matrix& c, double support_rel) {
  Matrix out = c;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const double eps = solver::support_eps(c.col(j), support_rel);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      if (std::abs(out(i, j)) <= eps) out(i, j) = 0.0;
    }
  }
  return out;
}

namespace {

void check_labels(const CoefficientMatrix& c, const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != c.size()) {
    throw Error(ErrorCode::DimensionMismatch, "labels length differs from coefficient matrix size");
  }
}

}  // namespace

RelViolation rel_violation(const CoefficientMatrix& c, const std::vector<int>& labels, double support_rel) {
  check_labels(c, labels);
  const Matrix t = threshold_coefficients(c.values(), support_rel);
  double in_mask = 0.0;
  double off_mask = 0.0;
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      const double a = std::abs(t(i, j));
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) {
        in_mask += a;
      } else {
        off_mask += a;
      }
    }
  }
  RelViolation out;
  if (in_mask == 0.0) {
    out.all_zero_mass = true;
    out.value = off_mask == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = off_mask / in_mask;
  return out;
}

SepCheck check_sep_and_trivial(const CoefficientMatrix& c, const std::vector<int>& labels, double support_rel) {
  check_labels(c, labels);
  const Matrix t = threshold_coefficients(c.values(), support_rel);
  SepCheck out;
  bool clean_blocks = true;
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    bool any = false;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (t(i, j) == 0.0) continue;
      any = true;
      if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) clean_blocks = false;
    }
    if (!any) ++out.trivial_columns;
  }
  out.sep_holds = clean_blocks && out.trivial_columns == 0;
  return out;
}

std::vector<int> hungarian(const Matrix& cost) {
  // O(n^3) shortest augmenting path with potentials (1-based internals).
  const auto n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error(ErrorCode::DimensionMismatch, "hungarian needs a square cost matrix");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  }
  return row_to_col;
}

double clustering_accuracy(const std::vector<int>& assignments, const std::vector<int>& truth, int num_labels) {
  if (assignments.size() != truth.size()) {
    throw Error(ErrorCode::LabelRangeMismatch, "assignment and truth lengths differ");
  }
  if (num_labels < 1) throw Error(ErrorCode::LabelRangeMismatch, "need at least one label");
  if (assignments.empty()) return 1.0;
  Matrix confusion = Matrix::Zero(num_labels, num_labels);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int a = assignments[i];
    const int t = truth[i];
    if (a < 0 || a >= num_labels || t < 0 || t >= num_labels) {
      throw Error(ErrorCode::LabelRangeMismatch, "label outside [0, L)");
    }
    confusion(a, t) += 1.0;
  }
  double best = 0.0;
  if (num_labels <= 8) {
    std::vector<int> perm(static_cast<std::size_t>(num_labels));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double agree = 0.0;
      for (int a = 0; a < num_labels; ++a) agree += confusion(a, perm[static_cast<std::size_t>(a)]);
      best = std::max(best, agree);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    const auto match = hungarian(-confusion);
    for (int a = 0; a < num_labels; ++a) best += confusion(a, match[static_cast<std::size_t>(a)]);
  }
  return best / static_cast<double>(truth.size());
}

ClusterResult evaluate(const CoefficientMatrix& c, const std::vector<int>& truth, int num_clusters,
                       const RngSpec& rng, double support_rel, const SpectralOptions& opts) {
  ClusterResult out;
  const auto graph = build_affinity(c);
  auto spectral = spectral_cluster(graph, num_clusters, rng, opts);
  out.assignments = std::move(spectral.assignments);
  out.degenerate = spectral.degenerate;
  out.accuracy = clustering_accuracy(out.assignments, truth, num_clusters);
  const auto rv = rel_violation(c, truth, support_rel);
  out.rel_violation = rv.value;
  out.all_zero_mass = rv.all_zero_mass;
  const auto sep = check_sep_and_trivial(c, truth, support_rel);
  out.sep_holds = sep.sep_holds;
  out.trivial_columns = sep.trivial_columns;
  return out;
}

}  // namespace ssc::cluster
