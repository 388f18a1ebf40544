#include "ssc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace ssc::geometry {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Eigen::Index kNone = -1;

// Coordinates of the points in the subspace basis, after checking membership
// and rank.
Matrix subspace_coordinates(const Matrix& points, const Matrix& basis) {
  if (points.rows() != basis.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "points and basis differ in ambient dimension");
  }
  if (basis.cols() < 1) throw Error(ErrorCode::InvalidInput, "empty basis");
  const Matrix coords = basis.transpose() * points;
  const Matrix off = points - basis * coords;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    if (off.col(j).norm() > 1e-8 * std::max(1.0, points.col(j).norm())) {
      throw Error(ErrorCode::InvalidInput,
                  "column " + std::to_string(j) + " does not lie in the span of the basis");
    }
  }
  const auto d = basis.cols();
  if (points.cols() < d) {
    throw Error(ErrorCode::RankDeficient, "fewer points than the subspace dimension");
  }
  Eigen::JacobiSVD<Matrix> svd(coords);
  const Vector& sv = svd.singularValues();
  if (sv[d - 1] <= 1e-10 * std::max(sv[0], 1e-300)) {
    throw Error(ErrorCode::RankDeficient, "points do not span the subspace");
  }
  return coords;
}

// max_{j != exclude} |a_j^T w|
double support_value(const Matrix& coords, const Vector& w, Eigen::Index exclude) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < coords.cols(); ++j) {
    if (j == exclude) continue;
    best = std::max(best, std::abs(coords.col(j).dot(w)));
  }
  return best;
}

// Pattern search on the unit sphere: try +-h along each coordinate, keep any
// improvement, halve h when a full sweep fails.
double refine_direction(const Matrix& coords, Vector w, Eigen::Index exclude, int steps) {
  double value = support_value(coords, w, exclude);
  double h = 0.05;
  for (int step = 0; step < steps; ++step) {
    bool improved = false;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      for (double sgn : {1.0, -1.0}) {
        Vector trial = w;
        trial[k] += sgn * h;
        trial.normalize();
        const double v = support_value(coords, trial, exclude);
        if (v < value) {
          value = v;
          w = trial;
          improved = true;
        }
      }
    }
    if (!improved) h *= 0.5;
  }
  return value;
}

// Golden-section search on the angle within one grid step of the best grid
// direction; near a minimum the support function has a single kink.
double refine_angle(const Matrix& coords, const Vector& w, Eigen::Index exclude, double half_width) {
  const double center = std::atan2(w[1], w[0]);
  auto f = [&](double theta) {
    Vector v(2);
    v << std::cos(theta), std::sin(theta);
    return support_value(coords, v, exclude);
  };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = center - half_width;
  double b = center + half_width;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

struct DirectionScan {
  double overall = kInf;
  Vector overall_dir;
  std::vector<double> loo;
  std::vector<Vector> loo_dir;
};

// Evaluates every direction once, tracking the two largest |a_j^T w| so that
// each leave-one-out value is available without rescanning.
template <typename DirectionAt>
DirectionScan scan_directions(const Matrix& coords, long count, DirectionAt&& direction_at, bool track_loo) {
  const auto m = coords.cols();
  DirectionScan scan;
  if (track_loo) {
    scan.loo.assign(static_cast<std::size_t>(m), kInf);
    scan.loo_dir.assign(static_cast<std::size_t>(m), Vector());
  }
  Vector w;
  for (long k = 0; k < count; ++k) {
    w = direction_at(k);
    double first = 0.0;
    double second = 0.0;
    Eigen::Index arg = kNone;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double v = std::abs(coords.col(j).dot(w));
      if (v > first) {
        second = first;
        first = v;
        arg = j;
      } else if (v > second) {
        second = v;
      }
    }
    if (first < scan.overall) {
      scan.overall = first;
      scan.overall_dir = w;
    }
    if (track_loo) {
      for (Eigen::Index i = 0; i < m; ++i) {
        const double v = (i == arg) ? second : first;
        auto& slot = scan.loo[static_cast<std::size_t>(i)];
        if (v < slot) {
          slot = v;
          scan.loo_dir[static_cast<std::size_t>(i)] = w;
        }
      }
    }
  }
  return scan;
}

DirectionScan scan(const Matrix& coords, const RngSpec& rng, const InradiusOptions& opts, bool track_loo) {
  const auto d = coords.rows();
  if (d == 1) {
    Vector w(1);
    w[0] = 1.0;
    return scan_directions(coords, 1, [&](long) { return w; }, track_loo);
  }
  if (d == 2) {
    const long grid = std::max(opts.angle_grid, 8);
    Vector w(2);
    return scan_directions(
        coords, grid,
        [&](long k) {
          const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid);
          w[0] = std::cos(theta);
          w[1] = std::sin(theta);
          return w;
        },
        track_loo);
  }
  if (opts.budget < 1) throw Error(ErrorCode::InvalidInput, "inradius budget must be >= 1");
  Rng gen(rng);
  return scan_directions(coords, opts.budget, [&](long) { return gen.unit_vector(d); }, track_loo);
}

double planar_step(const InradiusOptions& opts) {
  return std::numbers::pi / static_cast<double>(std::max(opts.angle_grid, 8));
}

}  // namespace

double estimate_inradius(const Matrix& points, const Matrix& basis, const RngSpec& rng,
                         const InradiusOptions& opts) {
  const Matrix coords = subspace_coordinates(points, basis);
  auto s = scan(coords, rng, opts, false);
  if (coords.rows() == 2 && opts.refine_steps > 0) {
    s.overall = std::min(s.overall, refine_angle(coords, s.overall_dir, kNone, planar_step(opts)));
  } else if (coords.rows() >= 3 && opts.refine_steps > 0) {
    s.overall = std::min(s.overall, refine_direction(coords, s.overall_dir, kNone, opts.refine_steps));
  }
  return s.overall;
}

std::vector<double> leave_one_out_inradius(const Matrix& points, const Matrix& basis, const RngSpec& rng,
                                           const InradiusOptions& opts) {
  const Matrix coords = subspace_coordinates(points, basis);
  auto s = scan(coords, rng, opts, true);
  if (coords.rows() == 2 && opts.refine_steps > 0) {
    for (std::size_t i = 0; i < s.loo.size(); ++i) {
      s.loo[i] = std::min(s.loo[i], refine_angle(coords, s.loo_dir[i], static_cast<Eigen::Index>(i), planar_step(opts)));
    }
  } else if (coords.rows() >= 3 && opts.refine_steps > 0) {
    std::vector<std::size_t> order(s.loo.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return s.loo[a] != s.loo[b] ? s.loo[a] < s.loo[b] : a < b;
    });
    const auto count = std::min(order.size(), static_cast<std::size_t>(std::max(opts.refine_candidates, 0)));
    for (std::size_t c = 0; c < count; ++c) {
      const auto i = order[c];
      s.loo[i] = std::min(s.loo[i], refine_direction(coords, s.loo_dir[i], static_cast<Eigen::Index>(i),
                                                     opts.refine_steps));
    }
  }
  return s.loo;
}

double circumradius_polar(const Matrix& points, const Matrix& basis, const RngSpec& rng,
                          const InradiusOptions& opts) {
  return 1.0 / estimate_inradius(points, basis, rng, opts);
}

Vector projected_dual_direction(const Vector& x, const Matrix& dictionary, const Matrix& basis,
                                const solver::SolveConfig& cfg) {
  if (basis.rows() != x.size()) throw Error(ErrorCode::DimensionMismatch, "basis rows differ from x");
  const auto sol = solver::solve_column(x, dictionary, cfg);
  const Vector nu = cfg.lambda * sol.residual;
  const Vector nu_in = project_onto(basis, nu);
  const double norm = nu_in.norm();
  if (norm <= 1e-10) {
    throw Error(ErrorCode::DegenerateDual, "projected dual vector vanishes (||P_S nu|| = " +
                                               std::to_string(norm) + ")");
  }
  return nu_in / norm;
}

IncoherenceResult subspace_incoherence(const LabeledDataset& dataset, const solver::SolveConfig& cfg) {
  dataset.validate();
  if (!dataset.ensemble) throw Error(ErrorCode::MissingCleanData, "incoherence needs the subspace ensemble");
  const int num = dataset.num_subspaces();
  if (num < 2) throw Error(ErrorCode::InvalidInput, "incoherence needs at least two subspaces");

  IncoherenceResult out;
  out.proxy = !dataset.clean.has_value();
  const Matrix& x = dataset.data.values();
  const Matrix& external = dataset.clean ? dataset.clean->values() : x;

  for (int l = 0; l < num; ++l) {
    const auto idx = dataset.members(l);
    const Matrix& basis = dataset.ensemble->basis(static_cast<std::size_t>(l));
    std::vector<Vector> directions;
    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (idx.size() < 2) {
        ++out.skipped_columns;
        continue;
      }
      Matrix dict(x.rows(), static_cast<Eigen::Index>(idx.size() - 1));
      Eigen::Index col = 0;
      for (std::size_t q = 0; q < idx.size(); ++q) {
        if (q != p) dict.col(col++) = x.col(idx[q]);
      }
      try {
        directions.push_back(projected_dual_direction(x.col(idx[p]), dict, basis, cfg));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateDual) throw;
        ++out.skipped_columns;
      }
    }
    double mu = directions.empty() ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    for (std::size_t j = 0; j < dataset.labels.size(); ++j) {
      if (dataset.labels[j] == l) continue;
      const auto y = external.col(static_cast<Eigen::Index>(j));
      for (const auto& v : directions) mu = std::max(mu, std::abs(v.dot(y)));
    }
    out.mu.push_back(mu);
  }
  return out;
}

double subspace_affinity(const Matrix& u_k, const Matrix& u_l) {
  if (u_k.rows() != u_l.rows()) throw Error(ErrorCode::DimensionMismatch, "bases differ in ambient dimension");
  return (u_k.transpose() * u_l).norm();
}

Vector canonical_cosines(const Matrix& u_k, const Matrix& u_l) {
  if (u_k.rows() != u_l.rows()) throw Error(ErrorCode::DimensionMismatch, "bases differ in ambient dimension");
  const Matrix m = u_k.transpose() * u_l;
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

NoiseMagnitudes noise_magnitudes(const LabeledDataset& dataset) {
  dataset.validate();
  if (!dataset.clean || !dataset.ensemble) {
    throw Error(ErrorCode::MissingCleanData, "noise magnitudes need clean data and the ensemble");
  }
  const Matrix z = dataset.data.values() - dataset.clean->values();
  NoiseMagnitudes out;
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    out.delta = std::max(out.delta, z.col(i).norm());
    for (const auto& u : dataset.ensemble->bases()) {
      out.delta1 = std::max(out.delta1, (u.transpose() * z.col(i)).norm());
    }
  }
  return out;
}

GeometryReport analyze(const LabeledDataset& dataset, const solver::SolveConfig& cfg, const RngSpec& rng,
                       const InradiusOptions& opts) {
  dataset.validate();
  if (!dataset.ensemble) throw Error(ErrorCode::MissingCleanData, "geometry report needs the subspace ensemble");
  const auto& ens = *dataset.ensemble;
  const int num = dataset.num_subspaces();

  GeometryReport rep;
  rep.lambda = cfg.lambda;
  rep.dims = ens.dims();
  rep.r_min = std::numeric_limits<double>::infinity();
  for (int l = 0; l < num; ++l) {
    const auto idx = dataset.members(l);
    const Matrix& basis = ens.basis(static_cast<std::size_t>(l));
    Matrix pts(dataset.data.ambient_dim(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t p = 0; p < idx.size(); ++p) {
      pts.col(static_cast<Eigen::Index>(p)) =
          dataset.clean ? Vector(dataset.clean->column(idx[p]))
                        : project_onto(basis, dataset.data.column(idx[p]));
    }
    const auto loo = leave_one_out_inradius(pts, basis, rng.child(static_cast<std::uint64_t>(l)), opts);
    const double r = *std::min_element(loo.begin(), loo.end());
    rep.r.push_back(r);
    rep.r_min = std::min(rep.r_min, r);
  }

  const auto inc = subspace_incoherence(dataset, cfg);
  rep.mu = inc.mu;
  rep.skipped_columns = inc.skipped_columns;
  rep.mu_proxy = inc.proxy;

  if (dataset.clean) {
    const auto nm = noise_magnitudes(dataset);
    rep.delta = nm.delta;
    rep.delta1 = nm.delta1;
  } else {
    rep.delta = std::numeric_limits<double>::quiet_NaN();
    rep.delta1 = std::numeric_limits<double>::quiet_NaN();
  }

  rep.affinity = Matrix::Zero(num, num);
  for (int a = 0; a < num; ++a) {
    for (int b = a; b < num; ++b) {
      const double aff = subspace_affinity(ens.basis(static_cast<std::size_t>(a)), ens.basis(static_cast<std::size_t>(b)));
      rep.affinity(a, b) = aff;
      rep.affinity(b, a) = aff;
    }
  }
  return rep;
}

}  // namespace ssc::geometry
