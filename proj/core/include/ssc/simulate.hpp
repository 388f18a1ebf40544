#pragma once

// Seeded generators for union-of-subspaces data and the two noise models.
//
//   fully_random            subspaces and samples uniformly at random
//   semi_random             fixed coordinate-aligned subspaces, random samples
//   deterministic_subspaces fixed subspaces and a fixed low-discrepancy sample
//                           pattern (no randomness except in the noise)
//
// Samples are unit vectors inside their subspace. Gaussian noise has iid
// N(0, sigma^2 / n) entries; adversarial noise has columns of norm exactly delta.

#include "ssc/core.hpp"
#include "ssc/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ssc::sim {

enum class ModelKind { fully_random, semi_random, deterministic_subspaces };
enum class NoiseKind { none, gaussian, adversarial };
enum class AdversarialPolicy { toward_nearest_other_subspace, random_fixed_norm };

const char* to_string(ModelKind kind);
const char* to_string(NoiseKind kind);
const char* to_string(AdversarialPolicy policy);
ModelKind parse_model_kind(const std::string& s);
NoiseKind parse_noise_kind(const std::string& s);
AdversarialPolicy parse_policy(const std::string& s);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double sigma = 0.0;
  double delta = 0.0;
  AdversarialPolicy policy = AdversarialPolicy::random_fixed_norm;
};

struct ModelSpec {
  ModelKind model = ModelKind::fully_random;
  int n = 0;
  std::vector<int> dims;
  /// N_l per subspace; when empty, N_l = round(kappa * d_l).
  std::vector<int> counts;
  std::optional<double> kappa;
  NoiseSpec noise;
  bool normalize_noisy = false;
  /// Dimensions shared by consecutive coordinate-aligned subspaces
  /// (semi_random / deterministic_subspaces only).
  int overlap = 0;

  /// n, d, L, kappa shorthand for equal-dimension models.
  static ModelSpec uniform(ModelKind model, int n, int d, int num_subspaces, double kappa,
                           NoiseSpec noise = {});

  std::vector<int> sample_counts() const;
  int total_samples() const;
  /// Throws InvalidSpec.
  void validate() const;
};

/// Deterministic in (spec, rng): identical inputs give bit-identical output.
/// The result carries clean data and the orthonormal ensemble.
LabeledDataset generate(const ModelSpec& spec, const RngSpec& rng);

/// Uniformly random d-dimensional subspace of R^n (orthonormal basis).
Matrix random_subspace(int n, int d, Rng& rng);

/// Coordinate-aligned basis e_offset .. e_{offset+d-1} (indices mod n).
Matrix coordinate_subspace(int n, int d, int offset);

struct CapCheck {
  double rate = 0.0;
  double bound = 0.0;
  /// One binomial standard deviation at the bound.
  double binomial_sigma = 0.0;
  long trials = 0;
};

/// Fraction of uniform unit vectors a in R^n with |a^T z| > eps for a fixed
/// unit z, alongside the cap bound 2 exp(-n eps^2 / 2). Needs trials >= 1000.
CapCheck spherical_cap_check(int n, long trials, double eps, const RngSpec& rng);

struct NormCheck {
  double rate = 0.0;
  double bound = 0.0;
  double binomial_sigma = 0.0;
  double t = 0.0;
  double mean_sq_norm = 0.0;
  long trials = 0;
};

/// Exceedance rate of ||z||^2 > (1 + t) sigma^2 for z with iid N(0, sigma^2/n)
/// entries and t = 6 log N / n, alongside exp((n/2)(log(1+t) - t)).
NormCheck gaussian_norm_check(int n, int num_samples, double sigma, long trials, const RngSpec& rng);

double spherical_cap_bound(int n, double eps);
double gaussian_norm_bound(int n, double t);

}  // namespace ssc::sim
