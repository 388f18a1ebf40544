#include "doctest.h"

#include "ssc/geometry.hpp"
#include "ssc/simulate.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace ssc;
using namespace ssc::geometry;

namespace {

Matrix unit_circle_points(const std::vector<double>& angles) {
  Matrix p(2, static_cast<Eigen::Index>(angles.size()));
  for (std::size_t i = 0; i < angles.size(); ++i) {
    p(0, static_cast<Eigen::Index>(i)) = std::cos(angles[i]);
    p(1, static_cast<Eigen::Index>(i)) = std::sin(angles[i]);
  }
  return p;
}

// Inradius of conv(+-p) for unit vectors in the plane: half the largest gap
// between the directions taken mod pi.
double circle_gap_oracle(std::vector<double> angles) {
  for (auto& a : angles) a = std::fmod(std::fmod(a, std::numbers::pi) + std::numbers::pi, std::numbers::pi);
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return std::cos(gap / 2.0);
}

// Distance from the origin to the nearest facet of conv(+-p) in R^2, found by
// testing every pair of vertices as a supporting line.
double hull_facet_oracle(const Matrix& p) {
  Matrix all(2, 2 * p.cols());
  all << p, -p;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < all.cols(); ++i) {
    for (Eigen::Index j = 0; j < all.cols(); ++j) {
      if (i == j) continue;
      const Eigen::Vector2d a = all.col(i);
      const Eigen::Vector2d b = all.col(j);
      const Eigen::Vector2d e = b - a;
      if (e.norm() < 1e-12) continue;
      Eigen::Vector2d normal(e.y(), -e.x());
      normal.normalize();
      double offset = normal.dot(a);
      if (offset < 0) {
        normal = -normal;
        offset = -offset;
      }
      bool supporting = true;
      for (Eigen::Index k = 0; k < all.cols(); ++k) {
        if (normal.dot(all.col(k)) > offset + 1e-12) supporting = false;
      }
      if (supporting) best = std::min(best, offset);
    }
  }
  return best;
}

Matrix basis_of(Eigen::Index n, std::initializer_list<Eigen::Index> coords) {
  Matrix b = Matrix::Zero(n, static_cast<Eigen::Index>(coords.size()));
  Eigen::Index k = 0;
  for (auto c : coords) b(c, k++) = 1.0;
  return b;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("cross-polytope inradius and its polar") {
  const Matrix pts = Matrix::Identity(2, 2);
  const Matrix basis = Matrix::Identity(2, 2);
  const double r = estimate_inradius(pts, basis, RngSpec{1, {}});
  CHECK(std::abs(r - 1.0 / std::sqrt(2.0)) <= 1e-3);
  const double big_r = circumradius_polar(pts, basis, RngSpec{1, {}});
  CHECK(std::abs(big_r - std::sqrt(2.0)) <= 2e-3);
  CHECK(r * big_r == doctest::Approx(1.0).epsilon(1e-15));

  // Same polytope in higher dimension: {+-e_i} in R^3 has inradius 1/sqrt(3).
  const double r3 = estimate_inradius(Matrix::Identity(3, 3), Matrix::Identity(3, 3), RngSpec{1, {}});
  CHECK(r3 >= 1.0 / std::sqrt(3.0) - 1e-12);
  CHECK(r3 <= 1.0 / std::sqrt(3.0) + 1e-3);
}

TEST_CASE("one-dimensional segment") {
  Matrix basis(3, 1);
  basis << 0, 0.6, 0.8;
  Matrix pts = 0.7 * basis;
  CHECK(estimate_inradius(pts, basis, RngSpec{2, {}}) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(circumradius_polar(basis, basis, RngSpec{2, {}}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("points on the circle match the gap oracle") {
  Rng rng(RngSpec{3, {}});
  std::vector<double> angles(50);
  for (auto& a : angles) a = 2.0 * std::numbers::pi * rng.uniform();
  const Matrix pts = unit_circle_points(angles);
  const double r = estimate_inradius(pts, Matrix::Identity(2, 2), RngSpec{3, {1}});
  const double oracle = circle_gap_oracle(angles);
  CHECK(r >= 0.95);
  CHECK(r <= 1.0);
  CHECK(std::abs(r - oracle) <= 1e-6);
}

TEST_CASE("planar inradius matches the facet oracle") {
  Rng rng(RngSpec{4, {}});
  for (int trial = 0; trial < 20; ++trial) {
    Matrix pts(2, 12);
    for (Eigen::Index j = 0; j < pts.cols(); ++j) pts.col(j) = (0.3 + 0.7 * rng.uniform()) * rng.unit_vector(2);
    const double r = estimate_inradius(pts, Matrix::Identity(2, 2), RngSpec{4, {1}});
    CHECK(std::abs(r - hull_facet_oracle(pts)) <= 1e-6);
  }
}

TEST_CASE("planar grid agrees with a random-direction estimate") {
  Rng rng(RngSpec{5, {}});
  const Matrix pts = testing::unit_columns(2, 15, rng);
  const double grid = estimate_inradius(pts, Matrix::Identity(2, 2), RngSpec{5, {1}});
  double sampled = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20000; ++k) {
    const Vector w = rng.unit_vector(2);
    sampled = std::min(sampled, (pts.transpose() * w).cwiseAbs().maxCoeff());
  }
  CHECK(std::abs(grid - sampled) <= 1e-2);
}

TEST_CASE("inradius is monotone under adding points") {
  InradiusOptions opts;
  opts.refine_steps = 0;
  opts.budget = 5000;
  for (int d : {2, 3, 5}) {
    Rng rng(RngSpec{6, {static_cast<std::uint64_t>(d)}});
    const Matrix basis = orthonormalize(testing::gaussian_matrix(10, d, rng));
    const Matrix coords = testing::unit_columns(d, 40, rng);
    const Matrix pts = basis * coords;
    double previous = 0.0;
    for (Eigen::Index m : {2 * d, 3 * d, 20, 30, 40}) {
      const double r = estimate_inradius(pts.leftCols(m), basis, RngSpec{7, {}}, opts);
      CAPTURE(d);
      CAPTURE(m);
      CHECK(r >= previous - 1e-15);
      CHECK(r <= 1.0 + 1e-12);
      previous = r;
    }
  }
}

TEST_CASE("inradius preconditions") {
  const Matrix basis = basis_of(3, {0, 1});
  Matrix off(3, 2);
  off << 1, 0, 0, 1, 0.1, 0;
  CHECK_THROWS_AS(estimate_inradius(off, basis, RngSpec{}), Error);
  Matrix line(3, 2);
  line << 1, 2, 0, 0, 0, 0;
  try {
    estimate_inradius(line, basis, RngSpec{});
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("leave-one-out inradius") {
  Rng rng(RngSpec{8, {}});
  std::vector<double> angles(12);
  for (auto& a : angles) a = 2.0 * std::numbers::pi * rng.uniform();
  const Matrix pts = unit_circle_points(angles);
  const auto loo = leave_one_out_inradius(pts, Matrix::Identity(2, 2), RngSpec{8, {1}});
  REQUIRE(loo.size() == 12);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    auto rest = angles;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    CHECK(std::abs(loo[i] - circle_gap_oracle(rest)) <= 1e-6);
  }
}

TEST_CASE("subspace affinity examples") {
  Rng rng(RngSpec{9, {}});
  const Matrix u = orthonormalize(testing::gaussian_matrix(8, 3, rng));
  CHECK(std::abs(subspace_affinity(u, u) - std::sqrt(3.0)) <= 1e-8);
  CHECK(subspace_affinity(basis_of(4, {0, 1}), basis_of(4, {2, 3})) == 0.0);

  Matrix l1(2, 1), l2(2, 1);
  l1 << 1, 0;
  l2 << std::cos(std::numbers::pi / 3), std::sin(std::numbers::pi / 3);
  CHECK(std::abs(subspace_affinity(l1, l2) - 0.5) <= 1e-12);

  CHECK_THROWS_AS(subspace_affinity(basis_of(4, {0}), basis_of(3, {0})), Error);

  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = orthonormalize(testing::gaussian_matrix(10, 2 + trial % 3, rng));
    const Matrix b = orthonormalize(testing::gaussian_matrix(10, 1 + trial % 4, rng));
    const double ab = subspace_affinity(a, b);
    CHECK(std::abs(ab - subspace_affinity(b, a)) <= 1e-12);
    const Vector cosines = canonical_cosines(a, b);
    CHECK(cosines.maxCoeff() <= 1.0 + 1e-10);
    CHECK(cosines.minCoeff() >= 0.0);
    CHECK(std::abs(ab * ab - cosines.squaredNorm()) <= 1e-12);
    CHECK(ab <= std::sqrt(static_cast<double>(std::min(a.cols(), b.cols()))) + 1e-12);
  }
}

TEST_CASE("projected dual direction") {
  solver::SolveConfig cfg;
  cfg.lambda = 2.0;
  const Vector x = Vector::Unit(2, 0);
  const Matrix dict = basis_of(2, {0});
  const Vector v = projected_dual_direction(x, dict, basis_of(2, {0}), cfg);
  CHECK((v - Vector::Unit(2, 0)).norm() <= 1e-12);

  // x orthogonal to the subspace: the dual has no in-subspace part.
  try {
    projected_dual_direction(Vector::Unit(2, 1), dict, basis_of(2, {0}), cfg);
    FAIL("expected DegenerateDual");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateDual);
  }

  Rng rng(RngSpec{10, {}});
  cfg.lambda = 5.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix basis = orthonormalize(testing::gaussian_matrix(8, 3, rng));
    const Matrix d = basis * testing::unit_columns(3, 6, rng) + 0.05 * testing::gaussian_matrix(8, 6, rng);
    const Vector y = basis * rng.unit_vector(3) + 0.05 * rng.normal_vector(8);
    const Vector w = projected_dual_direction(y, d, basis, cfg);
    CHECK(std::abs(w.norm() - 1.0) <= 1e-12);
    CHECK((w - project_onto(basis, w)).norm() <= 1e-10);
  }
}

TEST_CASE("incoherence of orthogonal and identical subspaces") {
  solver::SolveConfig cfg;
  cfg.lambda = 20.0;
  auto spec = sim::ModelSpec::uniform(sim::ModelKind::semi_random, 10, 2, 2, 6.0);
  const auto orth = sim::generate(spec, RngSpec{11, {}});
  const auto inc = subspace_incoherence(orth, cfg);
  REQUIRE(inc.mu.size() == 2);
  for (double m : inc.mu) CHECK(m <= 1e-8);
  CHECK_FALSE(inc.proxy);

  // Two labels sharing one plane.
  Rng rng(RngSpec{12, {}});
  const Matrix plane = orthonormalize(testing::gaussian_matrix(6, 2, rng));
  const Matrix y = plane * testing::unit_columns(2, 40, rng);
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) labels[static_cast<std::size_t>(i)] = i % 2;
  LabeledDataset same{DataMatrix(y), labels, DataMatrix(y), SubspaceEnsemble({plane, plane})};
  const auto inc2 = subspace_incoherence(same, cfg);
  for (double m : inc2.mu) {
    CHECK(m >= 0.95);
    CHECK(m <= 1.0 + 1e-12);
  }

  LabeledDataset no_clean{DataMatrix(y), labels, std::nullopt, SubspaceEnsemble({plane, plane})};
  CHECK(subspace_incoherence(no_clean, cfg).proxy);
}

TEST_CASE("noise magnitudes") {
  const Matrix b1 = basis_of(4, {0, 1});
  const Matrix b2 = basis_of(4, {2, 3});
  Matrix y(4, 4);
  y << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
  const std::vector<int> labels{0, 0, 1, 1};
  LabeledDataset clean{DataMatrix(y), labels, DataMatrix(y), SubspaceEnsemble({b1, b2})};
  auto nm = noise_magnitudes(clean);
  CHECK(nm.delta == 0.0);
  CHECK(nm.delta1 == 0.0);

  Matrix x = y;
  x(1, 0) += 0.3;
  LabeledDataset inside{DataMatrix(x), labels, DataMatrix(y), SubspaceEnsemble({b1, b2})};
  nm = noise_magnitudes(inside);
  CHECK(nm.delta == doctest::Approx(0.3));
  CHECK(nm.delta1 == doctest::Approx(nm.delta));

  x = y;
  x(0, 2) += 0.3;
  x(2, 2) += 0.4;
  LabeledDataset split{DataMatrix(x), labels, DataMatrix(y), SubspaceEnsemble({b1, b2})};
  nm = noise_magnitudes(split);
  CHECK(nm.delta == doctest::Approx(0.5));
  CHECK(nm.delta1 == doctest::Approx(0.4));

  LabeledDataset missing{DataMatrix(x), labels, std::nullopt, std::nullopt};
  try {
    noise_magnitudes(missing);
    FAIL("expected MissingCleanData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingCleanData);
  }
}

TEST_CASE("analyze invariants and rotation invariance") {
  sim::NoiseSpec noise;
  noise.kind = sim::NoiseKind::gaussian;
  noise.sigma = 0.05;
  const auto spec = sim::ModelSpec::uniform(sim::ModelKind::fully_random, 12, 3, 3, 5.0, noise);
  const auto ds = sim::generate(spec, RngSpec{13, {}});
  solver::SolveConfig cfg;
  cfg.lambda = 30.0;
  InradiusOptions opts;
  opts.budget = 3000;
  const auto rep = analyze(ds, cfg, RngSpec{14, {}}, opts);

  REQUIRE(rep.r.size() == 3);
  REQUIRE(rep.mu.size() == 3);
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(rep.r[l] > 0.0);
    CHECK(rep.r[l] <= 1.0 + 1e-12);
    CHECK(rep.mu[l] >= 0.0);
    CHECK(rep.mu[l] <= 1.0 + 1e-12);
  }
  CHECK(rep.r_min == *std::min_element(rep.r.begin(), rep.r.end()));
  CHECK(rep.delta1 <= rep.delta + 1e-15);
  CHECK(rep.inradius_upper_bound);
  for (Eigen::Index k = 0; k < 3; ++k) {
    CHECK(std::abs(rep.affinity(k, k) - std::sqrt(3.0)) <= 1e-8);
    for (Eigen::Index l = 0; l < 3; ++l) {
      CHECK(rep.affinity(k, l) == doctest::Approx(rep.affinity(l, k)).epsilon(1e-12));
      CHECK(rep.affinity(k, l) <= std::sqrt(3.0) + 1e-8);
    }
  }

  Rng rng(RngSpec{15, {}});
  const Matrix q = testing::random_rotation(12, rng);
  std::vector<Matrix> bases;
  for (const auto& b : ds.ensemble->bases()) bases.push_back(q * b);
  LabeledDataset rotated{DataMatrix(q * ds.data.values()), ds.labels, DataMatrix(q * ds.clean->values()),
                         SubspaceEnsemble(bases)};
  const auto rot = analyze(rotated, cfg, RngSpec{14, {}}, opts);
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(std::abs(rot.r[l] - rep.r[l]) <= 1e-8);
    CHECK(std::abs(rot.mu[l] - rep.mu[l]) <= 1e-8);
  }
  CHECK(std::abs(rot.delta - rep.delta) <= 1e-8);
  CHECK(std::abs(rot.delta1 - rep.delta1) <= 1e-8);
  CHECK((rot.affinity - rep.affinity).cwiseAbs().maxCoeff() <= 1e-8);
}

}  // TEST_SUITE
