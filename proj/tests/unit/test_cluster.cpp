#include "doctest.h"

#include "ssc/cluster.hpp"
#include "ssc/solver.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <numeric>

using namespace ssc;
using namespace ssc::cluster;

namespace {

std::vector<int> block_labels(int blocks, int size) {
  std::vector<int> labels;
  for (int b = 0; b < blocks; ++b) labels.insert(labels.end(), static_cast<std::size_t>(size), b);
  return labels;
}

Matrix block_coefficients(const std::vector<int>& labels, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix c = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) {
        c(i, j) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.2 + rng.uniform());
      }
    }
  }
  return c;
}

// Best agreement over every relabeling of `assignments`.
double brute_force_accuracy(const std::vector<int>& assignments, const std::vector<int>& truth, int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      hits += perm[static_cast<std::size_t>(assignments[i])] == truth[i] ? 1 : 0;
    }
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

}  // namespace

TEST_SUITE("cluster") {

TEST_CASE("affinity examples") {
  CHECK(build_affinity(CoefficientMatrix(Matrix::Zero(3, 3))).weights().cwiseAbs().maxCoeff() == 0.0);

  Matrix c = Matrix::Zero(3, 3);
  c(0, 1) = -0.5;
  const Matrix w = build_affinity(CoefficientMatrix(c)).weights();
  CHECK(w(0, 1) == 0.5);
  CHECK(w(1, 0) == 0.5);
  CHECK(w.sum() == 1.0);

  Rng rng(RngSpec{1, {}});
  const auto labels = block_labels(3, 4);
  const Matrix bc = block_coefficients(labels, rng);
  const Matrix bw = build_affinity(CoefficientMatrix(bc)).weights();
  CHECK((bw - bw.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(bw.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(bw.minCoeff() >= 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[i] != labels[j]) CHECK(bw(Eigen::Index(i), Eigen::Index(j)) == 0.0);
    }
  }

  Matrix asym = Matrix::Zero(2, 2);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(AffinityGraph{asym}, Error);
}

TEST_CASE("spectral clustering recovers disconnected blocks") {
  Rng rng(RngSpec{2, {}});
  const auto labels = block_labels(3, 6);
  const auto graph = build_affinity(CoefficientMatrix(block_coefficients(labels, rng)));
  const auto res = spectral_cluster(graph, 3, RngSpec{3, {}});
  CHECK_FALSE(res.degenerate);
  CHECK(clustering_accuracy(res.assignments, labels, 3) == 1.0);
  CHECK(res.eigenvalues.head(3).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("spectral clustering survives small off-block mass") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(RngSpec{4, {seed}});
    const auto labels = block_labels(3, 8);
    Matrix c = block_coefficients(labels, rng);
    const double in_mass = c.cwiseAbs().sum();
    Matrix noise = Matrix::Zero(c.rows(), c.cols());
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        if (labels[std::size_t(i)] != labels[std::size_t(j)]) noise(i, j) = rng.uniform();
      }
    }
    c += noise * (0.01 * in_mass / noise.sum());
    const auto res = spectral_cluster(build_affinity(CoefficientMatrix(c)), 3, RngSpec{5, {seed}});
    CAPTURE(seed);
    CHECK(clustering_accuracy(res.assignments, labels, 3) == 1.0);
  }
}

TEST_CASE("empty graph is degenerate") {
  const auto res = spectral_cluster(AffinityGraph(Matrix::Zero(6, 6)), 2, RngSpec{});
  CHECK(res.degenerate);
  CHECK(res.assignments.size() == 6);
  CHECK_THROWS_AS(spectral_cluster(AffinityGraph(Matrix::Zero(3, 3)), 4, RngSpec{}), Error);
  CHECK_THROWS_AS(spectral_cluster(AffinityGraph(Matrix::Zero(3, 3)), 1, RngSpec{}), Error);
}

TEST_CASE("spectral clustering is permutation equivariant") {
  Rng rng(RngSpec{6, {}});
  const auto labels = block_labels(4, 5);
  Matrix c = block_coefficients(labels, rng);
  c += 0.002 * testing::gaussian_matrix(c.rows(), c.cols(), rng).cwiseAbs();
  c.diagonal().setZero();
  const Matrix w = build_affinity(CoefficientMatrix(c)).weights();
  const auto base = spectral_cluster(AffinityGraph(w), 4, RngSpec{7, {}});

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(w.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  Matrix pw(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) pw(i, j) = w(perm[std::size_t(i)], perm[std::size_t(j)]);
  }
  const auto permuted = spectral_cluster(AffinityGraph(pw), 4, RngSpec{7, {}});
  std::vector<int> pulled_back(base.assignments.size());
  for (std::size_t i = 0; i < perm.size(); ++i) pulled_back[std::size_t(perm[i])] = permuted.assignments[i];
  CHECK(clustering_accuracy(pulled_back, base.assignments, 4) == 1.0);
  CHECK(clustering_accuracy(base.assignments, labels, 4) == 1.0);
}

TEST_CASE("laplacian reconstruction from its eigendecomposition") {
  Rng rng(RngSpec{8, {}});
  Matrix w = testing::gaussian_matrix(50, 50, rng).cwiseAbs();
  w = (w + w.transpose()).eval();
  w.diagonal().setZero();
  const Matrix lap = normalized_laplacian(AffinityGraph(w));
  Eigen::SelfAdjointEigenSolver<Matrix> es(lap);
  const Matrix back = es.eigenvectors() * es.eigenvalues().asDiagonal() * es.eigenvectors().transpose();
  CHECK((back - lap).norm() <= 1e-8);

  // Independent construction of I - D^-1/2 W D^-1/2.
  const Vector dinv = w.rowwise().sum().cwiseSqrt().cwiseInverse();
  const Matrix expected = Matrix::Identity(50, 50) - dinv.asDiagonal() * w * dinv.asDiagonal();
  CHECK((lap - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("relative violation") {
  Matrix c = Matrix::Zero(4, 4);
  const std::vector<int> labels{0, 0, 1, 1};
  c(1, 0) = 1.5;
  c(0, 1) = 0.5;
  c(2, 0) = -0.3;
  c(1, 3) = 0.2;
  const auto rv = rel_violation(CoefficientMatrix(c), labels);
  CHECK(rv.value == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_FALSE(rv.all_zero_mass);

  Matrix blocks = Matrix::Zero(4, 4);
  blocks(0, 1) = blocks(1, 0) = blocks(2, 3) = blocks(3, 2) = 1.0;
  CHECK(rel_violation(CoefficientMatrix(blocks), labels).value == 0.0);

  // Residue far below the column scale is dropped before the ratio.
  blocks(2, 0) = 1e-9;
  CHECK(rel_violation(CoefficientMatrix(blocks), labels).value == 0.0);

  const auto zero = rel_violation(CoefficientMatrix(Matrix::Zero(4, 4)), labels);
  CHECK(zero.all_zero_mass);
  CHECK(zero.value == 0.0);
  Matrix off = Matrix::Zero(4, 4);
  off(2, 0) = 1.0;
  const auto inf = rel_violation(CoefficientMatrix(off), labels);
  CHECK(inf.all_zero_mass);
  CHECK(std::isinf(inf.value));
}

TEST_CASE("detection property checks") {
  const std::vector<int> labels{0, 0, 1, 1};
  Matrix blocks = Matrix::Zero(4, 4);
  blocks(0, 1) = blocks(1, 0) = blocks(2, 3) = blocks(3, 2) = 0.7;
  auto sep = check_sep_and_trivial(CoefficientMatrix(blocks), labels);
  CHECK(sep.sep_holds);
  CHECK(sep.trivial_columns == 0);

  Matrix one_zero = blocks;
  one_zero.col(3).setZero();
  sep = check_sep_and_trivial(CoefficientMatrix(one_zero), labels);
  CHECK_FALSE(sep.sep_holds);
  CHECK(sep.trivial_columns == 1);

  Matrix leak = blocks;
  leak(2, 0) = 10.0 * solver::support_eps(blocks.col(0));
  sep = check_sep_and_trivial(CoefficientMatrix(leak), labels);
  CHECK_FALSE(sep.sep_holds);
  CHECK(sep.trivial_columns == 0);

  // SEP implies zero relative violation on random block matrices.
  Rng rng(RngSpec{9, {}});
  for (int trial = 0; trial < 50; ++trial) {
    const auto lab = block_labels(3, 4);
    Matrix c = block_coefficients(lab, rng);
    if (trial % 2 == 1) c(0, 11) = 1e-3 * rng.uniform();
    const auto s = check_sep_and_trivial(CoefficientMatrix(c), lab);
    if (s.sep_holds) CHECK(rel_violation(CoefficientMatrix(c), lab).value == 0.0);
  }
}

TEST_CASE("clustering accuracy") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  CHECK(clustering_accuracy(truth, truth, 3) == 1.0);
  CHECK(clustering_accuracy({2, 2, 0, 0, 1, 1}, truth, 3) == 1.0);
  CHECK(clustering_accuracy({0, 1, 1, 0}, {0, 0, 1, 1}, 2) == 0.5);
  CHECK_THROWS_AS(clustering_accuracy({0, 3}, {0, 1}, 2), Error);
  CHECK_THROWS_AS(clustering_accuracy({0, 1, 1}, {0, 1}, 2), Error);
  try {
    clustering_accuracy({0, 5}, {0, 1}, 2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LabelRangeMismatch);
  }

  // Hungarian path against exhaustive search.
  Rng rng(RngSpec{10, {}});
  for (int trial = 0; trial < 5; ++trial) {
    const int k = 9;
    std::vector<int> a(60), b(60);
    for (std::size_t i = 0; i < a.size(); ++i) {
      b[i] = static_cast<int>(rng.below(k));
      a[i] = rng.uniform() < 0.7 ? (b[i] + 4) % k : static_cast<int>(rng.below(k));
    }
    CHECK(clustering_accuracy(a, b, k) == doctest::Approx(brute_force_accuracy(a, b, k)).epsilon(1e-15));
    CHECK(clustering_accuracy(a, b, k) == doctest::Approx(clustering_accuracy(b, a, k)).epsilon(1e-15));
  }
}

TEST_CASE("hungarian matches brute force on small costs") {
  Rng rng(RngSpec{11, {}});
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 5;
    const Matrix cost = testing::gaussian_matrix(k, k, rng);
    const auto match = hungarian(cost);
    double got = 0.0;
    for (int i = 0; i < k; ++i) got += cost(i, match[std::size_t(i)]);
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += cost(i, perm[std::size_t(i)]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("kmeans and evaluate") {
  Matrix pts(9, 2);
  pts << 0, 0, 0.1, 0, 0, 0.1, 5, 5, 5.1, 5, 5, 5.1, -5, 5, -5.1, 5, -5, 5.1;
  const auto km = kmeans(pts, 3, RngSpec{12, {}});
  CHECK(clustering_accuracy(km.assignments, {0, 0, 0, 1, 1, 1, 2, 2, 2}, 3) == 1.0);
  CHECK(km.inertia < 0.1);

  Rng rng(RngSpec{13, {}});
  const auto labels = block_labels(2, 5);
  const auto res = evaluate(CoefficientMatrix(block_coefficients(labels, rng)), labels, 2, RngSpec{14, {}});
  CHECK(res.accuracy == 1.0);
  CHECK(res.sep_holds);
  CHECK(res.rel_violation == 0.0);
  CHECK(res.trivial_columns == 0);
  CHECK_FALSE(res.degenerate);
}

}  // TEST_SUITE
