#pragma once

// Sufficient conditions and admissible lambda intervals for the LASSO subspace
// detection property, evaluated from measured or assumed geometry.
//
// Absolute constants that the guarantees leave unspecified (C1, C2 for the
// fully random range; t for the semi-random bound) are parameters with
// default 1 and every such output is labelled advisory.

#include "ssc/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ssc::theory {

enum class TheoremKind { deterministic, random_noise, fully_random };

const char* to_string(TheoremKind kind);

struct LambdaInputs {
  std::vector<double> r;
  std::vector<double> mu;
  double delta = 0.0;
  double delta1 = 0.0;
  std::optional<double> epsilon;
  std::vector<int> dims;
  std::optional<int> n;
  std::optional<int> num_samples;
  std::optional<double> sigma;
  std::optional<double> kappa;
};

/// Admissible open interval (lower, upper). An unbounded upper end is an
/// explicit flag, never a float sentinel. `lower` is +inf when its
/// denominator is not positive (the interval is then empty).
struct LambdaRange {
  double lower = 0.0;
  double upper = 0.0;
  bool upper_unbounded = false;
  bool nonempty = false;
  TheoremKind theorem = TheoremKind::deterministic;
  LambdaInputs inputs;

  bool contains(double lambda) const;
  /// Geometric mean of the endpoints, or 2 * lower when unbounded above.
  double midpoint() const;
};

struct DeterministicConditions {
  double delta_bound = 0.0;
  bool gap_ok = false;
  LambdaRange range;
  /// rho = lambda delta (1 + delta) at the range endpoints.
  double rho_lower = 0.0;
  double rho_upper = 0.0;
};

/// Deterministic noise: delta <= min_l r (r_l - mu_l) / (2 + 7 r_l) together
/// with mu_l < r_l, and 1/(r - 2 delta - delta^2) < lambda <
/// min_l (r_l - mu_l - 2 delta1) / (delta (1 + delta)(2 + r_l - delta1)).
/// Throws InvalidInput if any r_l <= 0 or a quantity is not finite.
DeterministicConditions deterministic_conditions(const geometry::GeometryReport& report);

struct RandomNoiseConditions {
  double epsilon = 0.0;
  bool cond1 = false;
  bool cond2 = false;
  bool gap_ok = false;
  LambdaRange range;
  double rho_lower = 0.0;
  double rho_upper = 0.0;
};

/// Random noise: eps = sqrt(6 log N / (n - max_l d_l)).
RandomNoiseConditions random_noise_conditions(const geometry::GeometryReport& report, int n, int num_samples,
                                              const std::vector<int>& dims);

struct FullyRandomConstants {
  double c1 = 1.0;
  double c2 = 1.0;
};

struct FullyRandomConditions {
  double c_kappa = 0.0;
  int num_samples = 0;
  bool dim_ok = false;
  bool sigma_ok = false;
  double dim_bound = 0.0;
  double sigma_bound = 0.0;
  LambdaRange range;
  bool advisory = true;
};

/// Fully random model with N = L (kappa d + 1). c(kappa) = 1/sqrt(8), which
/// is only licensed for kappa >= 2; smaller kappa throws InvalidInput.
FullyRandomConditions fully_random_conditions(int n, int d, int num_subspaces, double kappa, double sigma,
                                              const FullyRandomConstants& constants = {});

struct SemirandomParams {
  int n = 0;
  int num_samples = 0;
  std::vector<int> dims;
  std::vector<int> counts;
  double t = 1.0;
};

struct SemirandomAdvisory {
  /// Right-hand side of the delta (1 + delta) noise bound (max over pairs).
  double bound = 0.0;
  bool feasible = false;
  bool advisory = true;
  /// Per ordered pair (l, l'), l != l'; diagonal left at -inf.
  Matrix pair_bounds;
};

/// Semi-random noise bound with K1 = t log[(N_l + 1) N_l'] + log L and
/// K2 = 4 sqrt(1 / log kappa_l), kappa_l = N_l / d_l. Uses the report's
/// affinity matrix. Throws InvalidInput when t <= 0 or some kappa_l <= 1.
SemirandomAdvisory semirandom_advisory(const geometry::GeometryReport& report, const SemirandomParams& params);

}  // namespace ssc::theory
