#include "ssc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ssc::theory {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidInput, what);
}

void check_report(const geometry::GeometryReport& rep) {
  require(!rep.r.empty(), "report has no subspaces");
  require(rep.r.size() == rep.mu.size(), "report r and mu differ in length");
  for (double r : rep.r) require(std::isfinite(r) && r > 0.0, "every r_l must be finite and > 0");
  for (double mu : rep.mu) require(std::isfinite(mu) && mu >= 0.0, "every mu_l must be finite and >= 0");
  require(std::isfinite(rep.delta) && rep.delta >= 0.0, "delta must be finite and >= 0");
  require(std::isfinite(rep.delta1) && rep.delta1 >= 0.0, "delta1 must be finite and >= 0");
}

double min_r(const geometry::GeometryReport& rep) { return *std::min_element(rep.r.begin(), rep.r.end()); }

void finish(LambdaRange& range) {
  range.nonempty = std::isfinite(range.lower) && range.lower > 0.0 &&
                   (range.upper_unbounded || range.lower < range.upper);
}

}  // namespace

const char* to_string(TheoremKind kind) {
  switch (kind) {
    case TheoremKind::deterministic: return "deterministic";
    case TheoremKind::random_noise: return "random_noise";
    case TheoremKind::fully_random: return "fully_random";
  }
  return "unknown";
}

bool LambdaRange::contains(double lambda) const {
  return nonempty && lambda > lower && (upper_unbounded || lambda < upper);
}

double LambdaRange::midpoint() const {
  if (upper_unbounded) return 2.0 * lower;
  return std::sqrt(lower * upper);
}

DeterministicConditions deterministic_conditions(const geometry::GeometryReport& report) {
  check_report(report);
  const double r = min_r(report);
  const double delta = report.delta;
  const double delta1 = report.delta1;

  DeterministicConditions out;
  out.delta_bound = kInf;
  bool gaps = true;
  for (std::size_t l = 0; l < report.r.size(); ++l) {
    const double rl = report.r[l];
    const double mul = report.mu[l];
    out.delta_bound = std::min(out.delta_bound, r * (rl - mul) / (2.0 + 7.0 * rl));
    gaps = gaps && (mul < rl);
  }
  out.gap_ok = gaps && delta <= out.delta_bound;

  LambdaRange& range = out.range;
  range.theorem = TheoremKind::deterministic;
  range.inputs.r = report.r;
  range.inputs.mu = report.mu;
  range.inputs.delta = delta;
  range.inputs.delta1 = delta1;
  range.inputs.dims = report.dims;

  const double den = r - 2.0 * delta - delta * delta;
  range.lower = den > 0.0 ? 1.0 / den : kInf;
  if (delta == 0.0) {
    range.upper_unbounded = true;
    range.upper = kInf;
  } else {
    range.upper = kInf;
    for (std::size_t l = 0; l < report.r.size(); ++l) {
      const double rl = report.r[l];
      const double num = rl - report.mu[l] - 2.0 * delta1;
      const double dd = delta * (1.0 + delta) * (2.0 + rl - delta1);
      range.upper = std::min(range.upper, num / dd);
    }
  }
  finish(range);
  out.rho_lower = range.lower * delta * (1.0 + delta);
  out.rho_upper = range.upper_unbounded ? kInf : range.upper * delta * (1.0 + delta);
  return out;
}

RandomNoiseConditions random_noise_conditions(const geometry::GeometryReport& report, int n, int num_samples,
                                              const std::vector<int>& dims) {
  check_report(report);
  require(dims.size() == report.r.size(), "dims must list one dimension per subspace");
  require(num_samples >= 2, "N must be >= 2");
  const int dmax = *std::max_element(dims.begin(), dims.end());
  require(n > dmax, "need n > max_l d_l");
  for (int d : dims) require(d >= 1, "dimensions must be >= 1");

  const double r = min_r(report);
  const double delta = report.delta;
  RandomNoiseConditions out;
  out.epsilon = std::sqrt(6.0 * std::log(static_cast<double>(num_samples)) / static_cast<double>(n - dmax));
  const double eps = out.epsilon;

  double bound1 = kInf;
  double bound2 = kInf;
  bool gaps = true;
  for (std::size_t l = 0; l < report.r.size(); ++l) {
    const double rl = report.r[l];
    const double gap = rl - report.mu[l];
    const double sd = std::sqrt(static_cast<double>(dims[l]));
    bound1 = std::min(bound1, gap / (2.0 * sd + 2.0));
    bound2 = std::min(bound2, r * gap / (4.0 * rl + 6.0));
    gaps = gaps && gap > 0.0;
  }
  out.cond1 = eps * delta < bound1;
  out.cond2 = eps * delta * (1.0 + delta) < bound2;
  out.gap_ok = gaps;

  LambdaRange& range = out.range;
  range.theorem = TheoremKind::random_noise;
  range.inputs.r = report.r;
  range.inputs.mu = report.mu;
  range.inputs.delta = delta;
  range.inputs.delta1 = report.delta1;
  range.inputs.epsilon = eps;
  range.inputs.dims = dims;
  range.inputs.n = n;
  range.inputs.num_samples = num_samples;

  const double den = r - 2.0 * eps * delta - eps * delta * delta;
  range.lower = den > 0.0 ? 1.0 / den : kInf;
  if (delta == 0.0) {
    range.upper_unbounded = true;
    range.upper = kInf;
  } else {
    range.upper = kInf;
    for (std::size_t l = 0; l < report.r.size(); ++l) {
      const double rl = report.r[l];
      const double shrink = delta * std::sqrt(static_cast<double>(dims[l])) * eps;
      const double num = rl - report.mu[l] - delta * eps - shrink;
      const double dd = eps * delta * (1.0 + delta) * (3.0 + rl - shrink);
      range.upper = std::min(range.upper, num / dd);
    }
  }
  finish(range);
  out.rho_lower = range.lower * delta * (1.0 + delta);
  out.rho_upper = range.upper_unbounded ? kInf : range.upper * delta * (1.0 + delta);
  return out;
}

FullyRandomConditions fully_random_conditions(int n, int d, int num_subspaces, double kappa, double sigma,
                                              const FullyRandomConstants& constants) {
  require(n >= 2 && d >= 1 && d < n, "need 1 <= d < n");
  require(num_subspaces >= 1, "need L >= 1");
  require(std::isfinite(kappa) && kappa >= 2.0, "c(kappa) = 1/sqrt(8) is only used for kappa >= 2");
  require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be >= 0");
  require(constants.c1 > 0.0 && constants.c2 > 0.0, "constants must be > 0");

  FullyRandomConditions out;
  out.c_kappa = 1.0 / std::sqrt(8.0);
  const double big_n = static_cast<double>(num_subspaces) * (kappa * d + 1.0);
  out.num_samples = static_cast<int>(std::lround(big_n));
  const double c2 = out.c_kappa * out.c_kappa;
  const double log_kappa = std::log(kappa);
  const double log_n = std::log(big_n);

  out.dim_bound = c2 * log_kappa * static_cast<double>(n) / (24.0 * log_n);
  out.dim_ok = static_cast<double>(d) < out.dim_bound;
  out.sigma_bound = c2 * log_kappa * std::sqrt(static_cast<double>(n)) / (20.0 * d);
  out.sigma_ok = sigma * (1.0 + sigma) < out.sigma_bound;

  LambdaRange& range = out.range;
  range.theorem = TheoremKind::fully_random;
  range.inputs.dims = std::vector<int>(static_cast<std::size_t>(num_subspaces), d);
  range.inputs.n = n;
  range.inputs.num_samples = out.num_samples;
  range.inputs.sigma = sigma;
  range.inputs.kappa = kappa;
  range.lower = constants.c1 * std::sqrt(static_cast<double>(d)) / (out.c_kappa * std::sqrt(log_kappa));
  if (sigma == 0.0) {
    range.upper_unbounded = true;
    range.upper = kInf;
  } else {
    range.upper = constants.c2 * out.c_kappa * std::sqrt(static_cast<double>(n) * log_kappa) /
                  (sigma * std::sqrt(static_cast<double>(d) * log_n));
  }
  finish(range);
  return out;
}

SemirandomAdvisory semirandom_advisory(const geometry::GeometryReport& report, const SemirandomParams& params) {
  const auto num = params.dims.size();
  require(num >= 2, "need at least two subspaces");
  require(params.counts.size() == num, "counts must list N_l per subspace");
  require(params.t > 0.0, "t must be > 0");
  require(report.affinity.rows() == static_cast<Eigen::Index>(num) &&
              report.affinity.cols() == static_cast<Eigen::Index>(num),
          "affinity matrix must be L x L");
  const int dmax = *std::max_element(params.dims.begin(), params.dims.end());
  require(params.n > dmax, "need n > max_l d_l");
  require(params.num_samples >= 2, "N must be >= 2");

  std::vector<double> log_kappa(num);
  double ratio = kInf;
  for (std::size_t l = 0; l < num; ++l) {
    require(params.dims[l] >= 1 && params.counts[l] >= 1, "dims and counts must be >= 1");
    const double kappa = static_cast<double>(params.counts[l]) / params.dims[l];
    require(kappa > 1.0, "kappa_l = N_l / d_l must exceed 1");
    log_kappa[l] = std::log(kappa);
    ratio = std::min(ratio, log_kappa[l] / params.dims[l]);
  }

  const double lead = std::sqrt(static_cast<double>(params.n - dmax) /
                                (6.0 * std::log(static_cast<double>(params.num_samples)))) *
                      std::sqrt(ratio);
  SemirandomAdvisory out;
  out.pair_bounds = Matrix::Constant(static_cast<Eigen::Index>(num), static_cast<Eigen::Index>(num), -kInf);
  out.bound = -kInf;
  for (std::size_t l = 0; l < num; ++l) {
    const double k2 = 4.0 * std::sqrt(1.0 / log_kappa[l]);
    for (std::size_t lp = 0; lp < num; ++lp) {
      if (l == lp) continue;
      const double k1 = params.t * std::log((params.counts[l] + 1.0) * params.counts[lp]) +
                        std::log(static_cast<double>(num));
      const double aff = report.affinity(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(lp));
      const double value = lead / (40.0 * k2 * std::sqrt(static_cast<double>(params.dims[l]))) *
                           (1.0 - k1 * k2 * aff / std::sqrt(static_cast<double>(params.dims[lp])));
      out.pair_bounds(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(lp)) = value;
      out.bound = std::max(out.bound, value);
    }
  }
  out.feasible = out.bound > 0.0;
  return out;
}

}  // namespace ssc::theory
