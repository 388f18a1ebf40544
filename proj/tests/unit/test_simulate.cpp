#include "doctest.h"

#include "ssc/geometry.hpp"
#include "ssc/simulate.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

using namespace ssc;
using namespace ssc::sim;

namespace {

NoiseSpec gaussian(double sigma) {
  NoiseSpec noise;
  noise.kind = NoiseKind::gaussian;
  noise.sigma = sigma;
  return noise;
}

double membership_error(const LabeledDataset& ds, const Matrix& points) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const Matrix& u = ds.ensemble->basis(static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)]));
    const Vector y = points.col(i);
    worst = std::max(worst, (y - project_onto(u, y)).norm());
  }
  return worst;
}

bool bit_identical(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("noiseless samples lie on their subspaces") {
  for (auto kind : {ModelKind::fully_random, ModelKind::semi_random, ModelKind::deterministic_subspaces}) {
    const auto spec = ModelSpec::uniform(kind, 20, 3, 4, 5.0);
    const auto ds = generate(spec, RngSpec{1, {}});
    CHECK((ds.data.values() - ds.clean->values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ds.data.values().colwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(membership_error(ds, ds.clean->values()) <= 1e-10);
    CHECK(ds.labels.size() == 60);
    CHECK(ds.num_subspaces() == 4);
    for (const auto& b : ds.ensemble->bases()) CHECK(orthonormality_error(b) <= 1e-10);
  }
}

TEST_CASE("n=100 d=4 L=3 kappa=5 noisy setting") {
  const auto spec = ModelSpec::uniform(ModelKind::fully_random, 100, 4, 3, 5.0, gaussian(0.2));
  CHECK(spec.total_samples() == 60);
  const auto ds = generate(spec, RngSpec{2, {}});
  CHECK(ds.data.num_samples() == 60);
  CHECK(ds.data.ambient_dim() == 100);
  const Matrix z = ds.data.values() - ds.clean->values();
  const Vector norms = z.colwise().norm();
  // ||z||^2 / sigma^2 is chi-square with n degrees of freedom over n.
  CHECK(std::abs(norms.mean() - 0.2) <= 0.02);
  CHECK(membership_error(ds, ds.clean->values()) <= 1e-10);
}

TEST_CASE("adversarial noise has exact norm") {
  for (auto policy : {AdversarialPolicy::toward_nearest_other_subspace, AdversarialPolicy::random_fixed_norm}) {
    NoiseSpec noise;
    noise.kind = NoiseKind::adversarial;
    noise.delta = 0.15;
    noise.policy = policy;
    const auto ds = generate(ModelSpec::uniform(ModelKind::fully_random, 15, 2, 3, 4.0, noise), RngSpec{3, {}});
    const Vector norms = (ds.data.values() - ds.clean->values()).colwise().norm();
    CHECK((norms.array() - 0.15).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("normalized noisy samples") {
  auto spec = ModelSpec::uniform(ModelKind::fully_random, 30, 3, 2, 5.0, gaussian(0.5));
  spec.normalize_noisy = true;
  const auto ds = generate(spec, RngSpec{4, {}});
  CHECK((ds.data.values().colwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("generation is deterministic") {
  const auto spec = ModelSpec::uniform(ModelKind::fully_random, 25, 3, 3, 4.0, gaussian(0.3));
  const auto a = generate(spec, RngSpec{5, {1, 2}});
  const auto b = generate(spec, RngSpec{5, {1, 2}});
  CHECK(bit_identical(a.data.values(), b.data.values()));
  CHECK(bit_identical(a.clean->values(), b.clean->values()));
  CHECK(a.labels == b.labels);
  const auto c = generate(spec, RngSpec{5, {1, 3}});
  CHECK_FALSE(bit_identical(a.data.values(), c.data.values()));
}

TEST_CASE("sample counts") {
  ModelSpec spec;
  spec.n = 10;
  spec.dims = {2, 3};
  spec.counts = {4, 7};
  CHECK(spec.sample_counts() == std::vector<int>{4, 7});
  CHECK(spec.total_samples() == 11);
  spec.counts.clear();
  spec.kappa = 2.5;
  CHECK(spec.sample_counts() == std::vector<int>{5, 8});
}

TEST_CASE("spec validation") {
  auto bad_dim = ModelSpec::uniform(ModelKind::fully_random, 4, 4, 2, 3.0);
  CHECK_THROWS_AS(bad_dim.validate(), Error);
  ModelSpec few;
  few.n = 10;
  few.dims = {3};
  few.counts = {2};
  CHECK_THROWS_AS(few.validate(), Error);
  auto neg = ModelSpec::uniform(ModelKind::fully_random, 10, 2, 2, 3.0, gaussian(-1.0));
  try {
    generate(neg, RngSpec{});
    FAIL("expected InvalidSpec");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidSpec);
  }
}

TEST_CASE("coordinate subspaces") {
  const Matrix b = coordinate_subspace(5, 2, 4);
  CHECK(b(4, 0) == 1.0);
  CHECK(b(0, 1) == 1.0);
  CHECK(b.cwiseAbs().sum() == 2.0);
  Rng rng(RngSpec{6, {}});
  CHECK(orthonormality_error(random_subspace(12, 5, rng)) <= 1e-10);
}

TEST_CASE("spherical cap check") {
  const auto full = spherical_cap_check(10, 2000, 1.0, RngSpec{7, {}});
  CHECK(full.rate == 0.0);

  // In the plane |a^T z| > 1/2 on two arcs of total angle 4 pi / 3.
  const auto planar = spherical_cap_check(2, 100000, 0.5, RngSpec{8, {}});
  const double exact = 2.0 / 3.0;
  CHECK(std::abs(planar.rate - exact) <= 4.0 * std::sqrt(exact * (1 - exact) / 100000.0));

  const auto c = spherical_cap_check(100, 100000, 0.3, RngSpec{9, {}});
  CHECK(c.bound == doctest::Approx(2.0 * std::exp(-4.5)).epsilon(1e-12));
  CHECK(c.rate <= c.bound + 3.0 * c.binomial_sigma);
  CHECK_THROWS_AS(spherical_cap_check(10, 10, 0.3, RngSpec{}), Error);
}

TEST_CASE("gaussian norm check") {
  const auto zero = gaussian_norm_check(100, 60, 0.0, 2000, RngSpec{10, {}});
  CHECK(zero.rate == 0.0);

  const long trials = 10000;
  const auto g = gaussian_norm_check(100, 60, 1.0, trials, RngSpec{11, {}});
  const double t = 6.0 * std::log(60.0) / 100.0;
  CHECK(g.t == doctest::Approx(t));
  CHECK(g.bound == doctest::Approx(std::exp(50.0 * (std::log(1.0 + t) - t))).epsilon(1e-12));
  CHECK(g.rate <= g.bound + 3.0 * g.binomial_sigma + 1.0 / trials);
  CHECK(std::abs(g.mean_sq_norm - 1.0) <= 3.0 * std::sqrt(2.0 / 100.0) / std::sqrt(double(trials)));
}

TEST_CASE("gaussian noise is isotropic") {
  const int n = 6;
  const int trials = 10000;
  const double sigma = 0.7;
  auto spec = ModelSpec::uniform(ModelKind::fully_random, n, 1, 2, 5000.0, gaussian(sigma));
  const auto ds = generate(spec, RngSpec{12, {}});
  const Matrix z = (ds.data.values() - ds.clean->values()).leftCols(trials);
  const Matrix cov = z * z.transpose() / trials;
  double off = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) off = std::max(off, std::abs(cov(i, j)));
    }
  }
  // Entries have variance sigma^2 / n.
  CHECK(off <= 5.0 * sigma * sigma / std::sqrt(double(trials)));
  CHECK(std::abs(cov.trace() - sigma * sigma) <= 0.05 * sigma * sigma);
}

TEST_CASE("semi-random inradius bound") {
  const double kappa = 5.0;
  const int d = 2;
  const double bound = std::sqrt(0.5 * std::log(kappa) / d) / std::sqrt(8.0);
  CHECK(bound == doctest::Approx(0.2243).epsilon(1e-3));
  int ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto ds = generate(ModelSpec::uniform(ModelKind::semi_random, 20, d, 2, kappa),
                             RngSpec{13, {static_cast<std::uint64_t>(trial)}});
    bool all = true;
    for (int l = 0; l < 2; ++l) {
      const auto idx = ds.members(l);
      Matrix pts(20, static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) pts.col(static_cast<Eigen::Index>(k)) = ds.clean->column(idx[k]);
      const auto loo = geometry::leave_one_out_inradius(pts, ds.ensemble->basis(static_cast<std::size_t>(l)),
                                                        RngSpec{14, {}});
      all = all && *std::min_element(loo.begin(), loo.end()) >= bound;
    }
    ok += all ? 1 : 0;
  }
  CHECK(ok >= 45);
}

}  // TEST_SUITE
