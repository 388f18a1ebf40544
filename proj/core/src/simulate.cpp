#include "ssc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ssc::sim {

namespace {

void spec_error(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

enum Stream : std::uint64_t { kSubspaces = 0, kSamples = 1, kNoise = 2 };

// Additive-recurrence low-discrepancy point in [0,1)^d (generalized golden
// ratio), mapped to a unit vector.
Vector low_discrepancy_direction(int d, int k) {
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  Vector v(d);
  for (int j = 0; j < d; ++j) {
    const double alpha = 1.0 / std::pow(phi, j + 1);
    const double frac = std::fmod(0.5 + alpha * (k + 1), 1.0);
    v[j] = 2.0 * frac - 1.0;
  }
  if (v.norm() < 1e-6) v[0] += 1.0;
  return v.normalized();
}

}  // namespace

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::fully_random: return "fully_random";
    case ModelKind::semi_random: return "semi_random";
    case ModelKind::deterministic_subspaces: return "deterministic_subspaces";
  }
  return "unknown";
}

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::adversarial: return "adversarial";
  }
  return "unknown";
}

const char* to_string(AdversarialPolicy policy) {
  return policy == AdversarialPolicy::toward_nearest_other_subspace ? "toward_nearest_other_subspace"
                                                                    : "random_fixed_norm";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "fully_random") return ModelKind::fully_random;
  if (s == "semi_random") return ModelKind::semi_random;
  if (s == "deterministic_subspaces") return ModelKind::deterministic_subspaces;
  spec_error("unknown model '" + s + "'");
  return ModelKind::fully_random;
}

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "none") return NoiseKind::none;
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "adversarial") return NoiseKind::adversarial;
  spec_error("unknown noise '" + s + "'");
  return NoiseKind::none;
}

AdversarialPolicy parse_policy(const std::string& s) {
  if (s == "toward_nearest_other_subspace") return AdversarialPolicy::toward_nearest_other_subspace;
  if (s == "random_fixed_norm") return AdversarialPolicy::random_fixed_norm;
  spec_error("unknown adversarial policy '" + s + "'");
  return AdversarialPolicy::random_fixed_norm;
}

ModelSpec ModelSpec::uniform(ModelKind model, int n, int d, int num_subspaces, double kappa, NoiseSpec noise) {
  ModelSpec spec;
  spec.model = model;
  spec.n = n;
  spec.dims.assign(static_cast<std::size_t>(std::max(num_subspaces, 0)), d);
  spec.kappa = kappa;
  spec.noise = noise;
  return spec;
}

std::vector<int> ModelSpec::sample_counts() const {
  if (!counts.empty()) return counts;
  std::vector<int> out;
  out.reserve(dims.size());
  const double k = kappa.value_or(0.0);
  for (int d : dims) out.push_back(static_cast<int>(std::lround(k * d)));
  return out;
}

int ModelSpec::total_samples() const {
  const auto c = sample_counts();
  return std::accumulate(c.begin(), c.end(), 0);
}

void ModelSpec::validate() const {
  if (n < 2) spec_error("n must be >= 2");
  if (dims.empty()) spec_error("need at least one subspace");
  if (!counts.empty() && counts.size() != dims.size()) spec_error("counts must match dims in length");
  if (counts.empty() && (!kappa || !(*kappa > 0.0) || !std::isfinite(*kappa))) {
    spec_error("either counts or a positive kappa is required");
  }
  const auto c = sample_counts();
  for (std::size_t l = 0; l < dims.size(); ++l) {
    if (dims[l] < 1 || dims[l] >= n) spec_error("every d_l must satisfy 1 <= d_l < n");
    if (c[l] < dims[l]) spec_error("every N_l must be >= d_l");
  }
  if (total_samples() < 2) spec_error("need at least two samples in total");
  if (overlap < 0) spec_error("overlap must be >= 0");
  if (model != ModelKind::fully_random) {
    for (int d : dims) {
      if (overlap >= d) spec_error("overlap must be smaller than every d_l");
    }
  }
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) spec_error("sigma must be >= 0");
  if (!(noise.delta >= 0.0) || !std::isfinite(noise.delta)) spec_error("delta must be >= 0");
}

Matrix random_subspace(int n, int d, Rng& rng) {
  for (;;) {
    Matrix g(n, d);
    for (int j = 0; j < d; ++j) g.col(j) = rng.normal_vector(n);
    try {
      return orthonormalize(g);
    } catch (const Error&) {
      // measure-zero event; redraw
    }
  }
}

Matrix coordinate_subspace(int n, int d, int offset) {
  Matrix u = Matrix::Zero(n, d);
  for (int j = 0; j < d; ++j) u(((offset + j) % n + n) % n, j) = 1.0;
  return u;
}

LabeledDataset generate(const ModelSpec& spec, const RngSpec& rng) {
  spec.validate();
  const int n = spec.n;
  const auto counts = spec.sample_counts();
  const auto num = static_cast<int>(spec.dims.size());
  const int total = spec.total_samples();

  std::vector<Matrix> bases;
  bases.reserve(static_cast<std::size_t>(num));
  int offset = 0;
  for (int l = 0; l < num; ++l) {
    const int d = spec.dims[static_cast<std::size_t>(l)];
    if (spec.model == ModelKind::fully_random) {
      Rng gen(rng.child(kSubspaces).child(static_cast<std::uint64_t>(l)));
      bases.push_back(random_subspace(n, d, gen));
    } else {
      bases.push_back(coordinate_subspace(n, d, offset));
      offset += d - spec.overlap;
    }
  }

  Matrix clean(n, total);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(total));
  Eigen::Index col = 0;
  for (int l = 0; l < num; ++l) {
    const int d = spec.dims[static_cast<std::size_t>(l)];
    Rng gen(rng.child(kSamples).child(static_cast<std::uint64_t>(l)));
    for (int k = 0; k < counts[static_cast<std::size_t>(l)]; ++k) {
      const Vector a = spec.model == ModelKind::deterministic_subspaces ? low_discrepancy_direction(d, k)
                                                                        : gen.unit_vector(d);
      Vector y = bases[static_cast<std::size_t>(l)] * a;
      y.normalize();
      clean.col(col++) = y;
      labels.push_back(l);
    }
  }

  Matrix noise = Matrix::Zero(n, total);
  Rng noise_gen(rng.child(kNoise));
  switch (spec.noise.kind) {
    case NoiseKind::none:
      break;
    case NoiseKind::gaussian: {
      const double sd = spec.noise.sigma / std::sqrt(static_cast<double>(n));
      for (Eigen::Index j = 0; j < total; ++j) noise.col(j) = noise_gen.normal_vector(n, sd);
      break;
    }
    case NoiseKind::adversarial: {
      const double delta = spec.noise.delta;
      for (Eigen::Index i = 0; i < total; ++i) {
        const auto& u = bases[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        Vector dir = Vector::Zero(n);
        if (spec.noise.policy == AdversarialPolicy::toward_nearest_other_subspace) {
          double best = -1.0;
          Eigen::Index best_j = -1;
          for (Eigen::Index j = 0; j < total; ++j) {
            if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)]) continue;
            const double c = std::abs(clean.col(i).dot(clean.col(j)));
            if (c > best) {
              best = c;
              best_j = j;
            }
          }
          if (best_j >= 0) {
            const double sgn = clean.col(i).dot(clean.col(best_j)) < 0.0 ? -1.0 : 1.0;
            const Vector target = sgn * clean.col(best_j);
            dir = target - project_onto(u, target);
          }
        }
        // random_fixed_norm, or no usable external point
        while (dir.norm() < 1e-12) {
          dir = noise_gen.unit_vector(n);
          if (spec.noise.policy == AdversarialPolicy::toward_nearest_other_subspace) dir -= project_onto(u, dir);
        }
        noise.col(i) = delta * dir / dir.norm();
      }
      break;
    }
  }

  Matrix x = clean + noise;
  if (spec.noise.kind == NoiseKind::none) x = clean;
  if (spec.normalize_noisy) x = normalize_columns(x);

  LabeledDataset ds{DataMatrix(std::move(x)), std::move(labels), DataMatrix(std::move(clean)),
                    SubspaceEnsemble(std::move(bases))};
  return ds;
}

double spherical_cap_bound(int n, double eps) { return 2.0 * std::exp(-n * eps * eps / 2.0); }

double gaussian_norm_bound(int n, double t) { return std::exp(0.5 * n * (std::log1p(t) - t)); }

CapCheck spherical_cap_check(int n, long trials, double eps, const RngSpec& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "n must be >= 1");
  if (trials < 1000) throw Error(ErrorCode::InvalidInput, "spherical_cap_check needs trials >= 1000");
  Rng gen(rng);
  const Vector z = gen.unit_vector(n);
  long hits = 0;
  for (long k = 0; k < trials; ++k) {
    if (std::abs(gen.unit_vector(n).dot(z)) > eps) ++hits;
  }
  CapCheck out;
  out.trials = trials;
  out.rate = static_cast<double>(hits) / static_cast<double>(trials);
  out.bound = spherical_cap_bound(n, eps);
  const double p = std::min(out.bound, 1.0);
  out.binomial_sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return out;
}

NormCheck gaussian_norm_check(int n, int num_samples, double sigma, long trials, const RngSpec& rng) {
  if (n < 1 || num_samples < 2) throw Error(ErrorCode::InvalidInput, "need n >= 1 and N >= 2");
  if (trials < 1000) throw Error(ErrorCode::InvalidInput, "gaussian_norm_check needs trials >= 1000");
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidInput, "sigma must be >= 0");
  Rng gen(rng);
  NormCheck out;
  out.trials = trials;
  out.t = 6.0 * std::log(static_cast<double>(num_samples)) / n;
  const double sd = sigma / std::sqrt(static_cast<double>(n));
  const double threshold = (1.0 + out.t) * sigma * sigma;
  long hits = 0;
  double sum = 0.0;
  for (long k = 0; k < trials; ++k) {
    const double sq = gen.normal_vector(n, sd).squaredNorm();
    sum += sq;
    if (sq > threshold) ++hits;
  }
  out.rate = static_cast<double>(hits) / static_cast<double>(trials);
  out.mean_sq_norm = sum / static_cast<double>(trials);
  out.bound = gaussian_norm_bound(n, out.t);
  const double p = std::min(out.bound, 1.0);
  out.binomial_sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return out;
}

}  // namespace ssc::sim
