#include "ssc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace ssc::solver {

const char* to_string(SolveMode mode) { return mode == SolveMode::column ? "column" : "matrix"; }

SolveMode parse_solve_mode(const std::string& s) {
  if (s == "column") return SolveMode::column;
  if (s == "matrix") return SolveMode::matrix;
  throw Error(ErrorCode::InvalidInput, "unknown solve mode '" + s + "' (expected column|matrix)");
}

void SolveConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidInput, "lambda must be > 0");
  if (mu0 < 0.0 || !std::isfinite(mu0)) throw Error(ErrorCode::InvalidInput, "mu0 must be > 0");
  if (!(rho >= 1.0)) throw Error(ErrorCode::InvalidInput, "rho must be >= 1");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerances must be > 0");
  if (max_iter < 1) throw Error(ErrorCode::InvalidInput, "max_iter must be >= 1");
  if (polish_every < 0) throw Error(ErrorCode::InvalidInput, "polish_every must be >= 0");
  if (!(support_rel > 0.0)) throw Error(ErrorCode::InvalidInput, "support_rel must be > 0");
}

double support_eps(const Eigen::Ref<const Vector>& c, double support_rel) {
  const double inf_norm = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  return support_rel * std::max(1.0, inf_norm);
}

double lasso_objective(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Matrix>& dictionary,
                       const Eigen::Ref<const Vector>& c, double lambda) {
  return c.lpNorm<1>() + 0.5 * lambda * (x - dictionary * c).squaredNorm();
}

double matrix_objective(const Matrix& x, const Matrix& c, double lambda) {
  return c.cwiseAbs().sum() + 0.5 * lambda * (x - x * c).squaredNorm();
}

namespace {

constexpr Eigen::Index kNoMask = -1;
constexpr std::size_t kPolishBatch = 8;

// Solves (lambda A^T A + mu I) y = q where A is X with an optional column
// masked to zero. Uses the m x m Gram system when m <= n and the n x n
// Woodbury form otherwise.
class RidgeFactor {
 public:
  RidgeFactor(const Matrix& a, const Matrix& gram, Eigen::Index masked, double lambda, double mu)
      : a_(a), masked_(masked), lambda_(lambda), mu_(mu) {
    const auto n = a.rows();
    const auto m = a.cols();
    woodbury_ = m > n;
    Matrix system;
    if (woodbury_) {
      system = lambda * (a * a.transpose());
      if (masked >= 0) system.noalias() -= lambda * a.col(masked) * a.col(masked).transpose();
      system.diagonal().array() += mu;
    } else {
      system = lambda * gram;
      if (masked >= 0) {
        system.row(masked).setZero();
        system.col(masked).setZero();
      }
      system.diagonal().array() += mu;
    }
    factorize(system);
  }

  Vector apply(const Vector& q) const {
    if (!woodbury_) return llt_.solve(q);
    Vector aq = a_ * q;
    if (masked_ >= 0) aq -= q[masked_] * a_.col(masked_);
    Vector w = llt_.solve(aq);
    Vector at_w = a_.transpose() * w;
    if (masked_ >= 0) at_w[masked_] = 0.0;
    return (q - lambda_ * at_w) / mu_;
  }

  Matrix apply(const Matrix& q) const {
    if (!woodbury_) return llt_.solve(q);
    Matrix w = llt_.solve(a_ * q);
    Matrix out = q;
    out.noalias() -= lambda_ * (a_.transpose() * w);
    out /= mu_;
    return out;
  }

 private:
  void factorize(Matrix& system) {
    llt_.compute(system);
    if (llt_.info() == Eigen::Success && llt_.matrixLLT().allFinite()) return;
    const double jitter = 1e-10 * std::max(1.0, system.diagonal().cwiseAbs().maxCoeff());
    system.diagonal().array() += jitter;
    llt_.compute(system);
    if (llt_.info() != Eigen::Success || !llt_.matrixLLT().allFinite()) {
      throw Error(ErrorCode::CholeskyFailure,
                  "lambda X^T X + mu I is numerically singular; check data scaling");
    }
  }

  const Matrix& a_;
  Eigen::Index masked_;
  double lambda_;
  double mu_;
  bool woodbury_ = false;
  Eigen::LLT<Matrix> llt_;
};

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// One LASSO column expressed through the Gram matrix G = A^T A and b = A^T x.
// Column `masked` of A is treated as absent.
struct GramProblem {
  const Matrix& gram;
  Vector b;
  double xx;
  Eigen::Index masked;
  double lambda;
  // Ambient dimension: more active columns than this are linearly dependent.
  Eigen::Index rank_bound;

  double objective(const Vector& c) const {
    const double quad = xx - 2.0 * b.dot(c) + c.dot(gram * c);
    return c.lpNorm<1>() + 0.5 * lambda * std::max(quad, 0.0);
  }

  // A^T nu with nu = lambda (x - A c), using only the support of c.
  Vector correlations(const std::vector<Eigen::Index>& idx, const Vector& cs) const {
    Vector g = b;
    for (std::size_t p = 0; p < idx.size(); ++p) g.noalias() -= cs[p] * gram.col(idx[p]);
    g *= lambda;
    if (masked >= 0) g[masked] = 0.0;
    return g;
  }
};

double kkt_violation(const GramProblem& prob, const Vector& c, double support_rel) {
  const double eps = support_eps(c, support_rel);
  std::vector<Eigen::Index> idx;
  Vector cs(c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (c[j] != 0.0) {
      cs[static_cast<Eigen::Index>(idx.size())] = c[j];
      idx.push_back(j);
    }
  }
  const Vector g = prob.correlations(idx, cs.head(static_cast<Eigen::Index>(idx.size())));
  double worst = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (j == prob.masked) continue;
    if (std::abs(c[j]) > eps) {
      worst = std::max(worst, std::abs(g[j] - sign_of(c[j])));
    } else {
      worst = std::max(worst, std::abs(g[j]) - 1.0);
    }
  }
  return std::max(worst, 0.0);
}

// Active-set (feature-sign) refinement warm-started from an ADMM iterate.
// Returns the exact minimizer when it can certify the KKT conditions to `tol`.
std::optional<Vector> polish_column(const GramProblem& prob, const Vector& start, double tol,
                                    double support_rel, double* kkt_out) {
  const Eigen::Index m = prob.b.size();
  const double eps = support_eps(start, support_rel);

  std::vector<Eigen::Index> active;
  std::vector<double> signs;
  std::vector<double> values;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (j != prob.masked && std::abs(start[j]) > eps) {
      active.push_back(j);
      signs.push_back(sign_of(start[j]));
      values.push_back(start[j]);
    }
  }
  // A start with more active columns than the ambient dimension is far from
  // any vertex solution; growing the support from zero is much cheaper.
  if (static_cast<Eigen::Index>(active.size()) > prob.rank_bound) {
    active.clear();
    signs.clear();
    values.clear();
  }

  std::size_t batch = kPolishBatch;
  const int max_rounds = static_cast<int>(4 * m + 200);
  for (int round = 0; round < max_rounds; ++round) {
    const auto k = static_cast<Eigen::Index>(active.size());
    Vector current = Eigen::Map<const Vector>(values.data(), k);

    if (k > 0) {
      Matrix gs(k, k);
      Vector rhs(k);
      Vector s(k);
      for (Eigen::Index p = 0; p < k; ++p) {
        s[p] = signs[p];
        rhs[p] = prob.b[active[p]] - signs[p] / prob.lambda;
        for (Eigen::Index q = 0; q < k; ++q) gs(p, q) = prob.gram(active[p], active[q]);
      }

      // Cholesky for the regular case; the eigen-decomposition is only
      // needed to find a flat direction when G_SS is (nearly) singular.
      const double scale = std::max(gs.diagonal().maxCoeff(), 1e-300);
      Eigen::LLT<Matrix> llt(gs);
      bool singular = llt.info() != Eigen::Success ||
                      llt.matrixLLT().diagonal().array().square().minCoeff() <= 1e-10 * scale;
      Vector solution;
      if (!singular) {
        solution = llt.solve(rhs);
        singular = !solution.allFinite();
      }
      Vector target;
      if (singular) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gs);
        // Flat direction: the quadratic term is constant along v, the l1 term is
        // linear (s^T v) inside this orthant. Move downhill until a coordinate
        // reaches zero and drop it.
        Vector v = eig.eigenvectors().col(0);
        if (s.dot(v) > 0.0) v = -v;
        double step = std::numeric_limits<double>::infinity();
        for (Eigen::Index p = 0; p < k; ++p) {
          if (current[p] * v[p] < 0.0) step = std::min(step, -current[p] / v[p]);
        }
        if (!std::isfinite(step)) return std::nullopt;
        target = current + step * v;
        Eigen::Index zero_at = 0;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index p = 0; p < k; ++p) {
          if (current[p] * v[p] < 0.0 && std::abs(target[p]) < best) {
            best = std::abs(target[p]);
            zero_at = p;
          }
        }
        target[zero_at] = 0.0;
      } else {
        // Line search from current to solution. The objective is convex along
        // the segment and smooth between sign changes, so it is sampled at the
        // crossing points (in order) and the end point until it starts rising.
        target = solution;
        bool consistent = true;
        for (Eigen::Index p = 0; p < k; ++p) {
          if (solution[p] * s[p] <= 0.0) consistent = false;
        }
        if (!consistent) {
          Vector bs(k);
          for (Eigen::Index p = 0; p < k; ++p) bs[p] = prob.b[active[p]];
          auto objective = [&](const Vector& c) {
            const double quad = prob.xx - 2.0 * bs.dot(c) + c.dot(gs * c);
            return c.lpNorm<1>() + 0.5 * prob.lambda * std::max(quad, 0.0);
          };
          std::vector<std::pair<double, Eigen::Index>> breaks;
          for (Eigen::Index p = 0; p < k; ++p) {
            if (current[p] * solution[p] < 0.0 || (solution[p] == 0.0 && current[p] != 0.0)) {
              breaks.emplace_back(current[p] / (current[p] - solution[p]), p);
            }
          }
          std::sort(breaks.begin(), breaks.end());
          breaks.emplace_back(1.0, -1);
          const double start_obj = objective(current);
          double best_obj = std::numeric_limits<double>::infinity();
          for (const auto& [t, hit] : breaks) {
            Vector cand = current + t * (solution - current);
            if (hit >= 0) cand[hit] = 0.0;
            const double obj = objective(cand);
            if (!(obj < best_obj)) break;
            best_obj = obj;
            target = std::move(cand);
          }
          // No decrease means a batch of entering coordinates can cycle;
          // from here on they enter one at a time.
          if (!(best_obj < start_obj)) batch = 1;
        }
      }

      std::vector<Eigen::Index> next_active;
      std::vector<double> next_signs;
      std::vector<double> next_values;
      bool changed = false;
      for (Eigen::Index p = 0; p < k; ++p) {
        if (target[p] != 0.0) {
          next_active.push_back(active[p]);
          next_signs.push_back(sign_of(target[p]));
          next_values.push_back(target[p]);
          changed = changed || sign_of(target[p]) != s[p];
        } else {
          changed = true;
        }
      }
      active = std::move(next_active);
      signs = std::move(next_signs);
      values = std::move(next_values);
      if (changed) continue;
    }

    // Optimality for active coefficients holds by construction; check the
    // zero coefficients and activate the worst violator.
    const auto ka = static_cast<Eigen::Index>(active.size());
    const Vector cs = Eigen::Map<const Vector>(values.data(), ka);
    const Vector g = prob.correlations(active, cs);
    std::vector<char> in_active(static_cast<std::size_t>(m), 0);
    for (auto j : active) in_active[static_cast<std::size_t>(j)] = 1;

    // A few of the worst violators enter together; each one is a descent
    // direction, so the line search above still decreases the objective.
    std::vector<std::pair<double, Eigen::Index>> violators;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == prob.masked || in_active[static_cast<std::size_t>(j)]) continue;
      const double viol = std::abs(g[j]) - 1.0;
      if (viol > tol) violators.emplace_back(-viol, j);
    }
    if (!violators.empty()) {
      // Entering past the ambient dimension forces a singular system, so only
      // one coordinate enters at a time once the support is that large.
      const auto room = static_cast<std::size_t>(std::max<Eigen::Index>(prob.rank_bound - ka, 1));
      const std::size_t take = std::min({violators.size(), batch, room});
      std::partial_sort(violators.begin(), violators.begin() + static_cast<std::ptrdiff_t>(take), violators.end());
      for (std::size_t p = 0; p < take; ++p) {
        const Eigen::Index j = violators[p].second;
        active.push_back(j);
        signs.push_back(sign_of(g[j]));
        values.push_back(0.0);
      }
      continue;
    }

    Vector c = Vector::Zero(m);
    for (Eigen::Index p = 0; p < ka; ++p) c[active[p]] = cs[p];
    const double kkt = kkt_violation(prob, c, support_rel);
    if (kkt > tol) return std::nullopt;
    if (kkt_out) *kkt_out = kkt;
    return c;
  }
  return std::nullopt;
}

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " iterates diverged");
}

void check_warm_start(const Matrix& x, const Matrix* warm_start) {
  if (warm_start && (warm_start->rows() != x.cols() || warm_start->cols() != x.cols())) {
    throw Error(ErrorCode::DimensionMismatch, "warm start must be N x N");
  }
}

struct ColumnAdmmResult {
  Vector c;
  int iterations = 0;
  bool converged = false;
  bool polished = false;
  double kkt = 0.0;
};

// ADMM for one column (J = c, C = z, Lambda = mu * u).
ColumnAdmmResult admm_column(const Matrix& a, const GramProblem& prob, const SolveConfig& cfg,
                              const Vector* warm_start = nullptr) {
  ColumnAdmmResult out;
  if (warm_start && cfg.polish) {
    double kkt = 0.0;
    if (auto p = polish_column(prob, *warm_start, cfg.tol_dual, cfg.support_rel, &kkt)) {
      out.c = std::move(*p);
      out.converged = true;
      out.polished = true;
      out.kkt = kkt;
      return out;
    }
  }

  const Eigen::Index m = a.cols();
  double mu = cfg.effective_mu0();
  auto factor = std::make_unique<RidgeFactor>(a, prob.gram, prob.masked, cfg.lambda, mu);

  const Vector lambda_b = cfg.lambda * prob.b;
  Vector c = Vector::Zero(m);
  Vector z = Vector::Zero(m);
  Vector u = Vector::Zero(m);
  Vector z_prev(m);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    c = factor->apply(Vector(lambda_b + mu * (z - u)));
    z_prev = z;
    const double thresh = 1.0 / mu;
    for (Eigen::Index j = 0; j < m; ++j) z[j] = soft_threshold(c[j] + u[j], thresh);
    if (prob.masked >= 0) z[prob.masked] = 0.0;
    u += c - z;
    check_finite(z, "column ADMM");
    out.iterations = it;

    const double scale = 1.0 + z.norm();
    const double primal = (c - z).norm();
    const double dual = mu * (z - z_prev).norm();
    if (primal <= cfg.tol_primal * scale && dual <= cfg.tol_dual * scale) {
      out.converged = true;
      break;
    }
    if (cfg.polish && cfg.polish_every > 0 && it % cfg.polish_every == 0) {
      double kkt = 0.0;
      if (auto p = polish_column(prob, z, cfg.tol_dual, cfg.support_rel, &kkt)) {
        out.c = std::move(*p);
        out.converged = true;
        out.polished = true;
        out.kkt = kkt;
        return out;
      }
    }
    if (cfg.rho > 1.0) {
      const double next = mu * cfg.rho;
      u *= mu / next;
      mu = next;
      factor = std::make_unique<RidgeFactor>(a, prob.gram, prob.masked, cfg.lambda, mu);
    }
  }

  if (cfg.polish) {
    double kkt = 0.0;
    if (auto p = polish_column(prob, z, cfg.tol_dual, cfg.support_rel, &kkt)) {
      out.c = std::move(*p);
      out.converged = true;
      out.polished = true;
      out.kkt = kkt;
      return out;
    }
  }
  out.c = std::move(z);
  out.kkt = kkt_violation(prob, out.c, cfg.support_rel);
  return out;
}

}  // namespace

ColumnSolution solve_column(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Matrix>& dictionary,
                            const SolveConfig& cfg) {
  cfg.validate();
  if (dictionary.cols() < 1) throw Error(ErrorCode::InvalidInput, "dictionary needs at least one column");
  if (dictionary.rows() != x.size()) {
    throw Error(ErrorCode::DimensionMismatch, "dictionary rows differ from x length");
  }
  if (!x.allFinite() || !dictionary.allFinite()) throw Error(ErrorCode::NonFinite, "non-finite input");

  const Matrix a = dictionary;
  const Matrix gram = a.transpose() * a;
  GramProblem prob{gram, a.transpose() * x, x.squaredNorm(), kNoMask, cfg.lambda, a.rows()};
  auto res = admm_column(a, prob, cfg);

  ColumnSolution sol;
  sol.coefficients = std::move(res.c);
  sol.residual = x - a * sol.coefficients;
  sol.objective = sol.coefficients.lpNorm<1>() + 0.5 * cfg.lambda * sol.residual.squaredNorm();
  sol.iterations = res.iterations;
  sol.converged = res.converged;
  sol.polished = res.polished;
  sol.kkt_residual = res.kkt;
  return sol;
}

MatrixSolution solve_columnwise(const Matrix& x, const SolveConfig& cfg, const Matrix* warm_start) {
  cfg.validate();
  if (x.cols() < 2) throw Error(ErrorCode::InvalidInput, "need at least two samples");
  check_warm_start(x, warm_start);
  if (!x.allFinite()) throw Error(ErrorCode::NonFinite, "non-finite data");
  const Eigen::Index n_samples = x.cols();
  const Matrix gram = x.transpose() * x;

  Matrix c = Matrix::Zero(n_samples, n_samples);
  MatrixSolution out{CoefficientMatrix(Matrix::Zero(n_samples, n_samples))};
  out.mode = SolveMode::column;
  out.converged = true;
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    Vector b = gram.col(i);
    b[i] = 0.0;
    GramProblem prob{gram, std::move(b), gram(i, i), i, cfg.lambda, x.rows()};
    Vector warm;
    if (warm_start) warm = warm_start->col(i);
    auto res = admm_column(x, prob, cfg, warm_start ? &warm : nullptr);
    res.c[i] = 0.0;
    c.col(i) = res.c;
    out.iterations = std::max(out.iterations, res.iterations);
    out.converged = out.converged && res.converged;
    out.polished_columns += res.polished ? 1 : 0;
    out.kkt_residual = std::max(out.kkt_residual, res.kkt);
  }
  out.objective = matrix_objective(x, c, cfg.lambda);
  out.coefficients = CoefficientMatrix(std::move(c));
  return out;
}

MatrixSolution solve_matrix(const Matrix& x, const SolveConfig& cfg, const Matrix* warm_start) {
  cfg.validate();
  if (x.cols() < 2) throw Error(ErrorCode::InvalidInput, "need at least two samples");
  check_warm_start(x, warm_start);
  if (!x.allFinite()) throw Error(ErrorCode::NonFinite, "non-finite data");
  const Eigen::Index n_samples = x.cols();
  const Matrix gram = x.transpose() * x;
  const double lambda = cfg.lambda;
  double mu = cfg.effective_mu0();
  auto factor = std::make_unique<RidgeFactor>(x, gram, kNoMask, lambda, mu);

  const Matrix eye = Matrix::Identity(n_samples, n_samples);
  Matrix c = Matrix::Zero(n_samples, n_samples);
  Matrix j = Matrix::Zero(n_samples, n_samples);
  Matrix dual = Matrix::Zero(n_samples, n_samples);
  Matrix c_prev(n_samples, n_samples);

  auto column_problem = [&](Eigen::Index i) {
    Vector b = gram.col(i);
    b[i] = 0.0;
    return GramProblem{gram, std::move(b), gram(i, i), i, lambda, x.rows()};
  };

  // Columns are independent problems, so a column certified once stays in
  // `fixed` while ADMM keeps iterating the rest.
  std::vector<char> certified(static_cast<std::size_t>(n_samples), 0);
  Matrix fixed = Matrix::Zero(n_samples, n_samples);
  std::size_t num_certified = 0;
  double worst_kkt = 0.0;
  auto polish_pending = [&](const Matrix& start) {
    for (Eigen::Index i = 0; i < n_samples; ++i) {
      if (certified[static_cast<std::size_t>(i)]) continue;
      double kkt = 0.0;
      if (auto p = polish_column(column_problem(i), start.col(i), cfg.tol_dual, cfg.support_rel, &kkt)) {
        fixed.col(i) = *p;
        fixed(i, i) = 0.0;
        certified[static_cast<std::size_t>(i)] = 1;
        ++num_certified;
        worst_kkt = std::max(worst_kkt, kkt);
      }
    }
    return num_certified == static_cast<std::size_t>(n_samples);
  };

  MatrixSolution out{CoefficientMatrix(Matrix::Zero(n_samples, n_samples))};
  out.mode = SolveMode::matrix;
  bool done = warm_start && cfg.polish && polish_pending(*warm_start);
  for (int it = 1; !done && it <= cfg.max_iter; ++it) {
    // J = (lambda X^T X + mu I)^{-1} (lambda X^T X + mu C - Lambda)
    //   = I + (lambda X^T X + mu I)^{-1} (mu (C - I) - Lambda)
    Matrix rhs = mu * (c - eye) - dual;
    j = eye + factor->apply(rhs);

    c_prev = c;
    const double thresh = 1.0 / mu;
    c = (j + dual / mu).unaryExpr([thresh](double v) { return soft_threshold(v, thresh); });
    c.diagonal().setZero();
    dual += mu * (j - c);
    check_finite(c, "matrix ADMM");
    out.iterations = it;

    const double scale = 1.0 + c.norm();
    const double primal = (j - c).norm();
    const double dual_res = mu * (c - c_prev).norm();
    if (primal <= cfg.tol_primal * scale && dual_res <= cfg.tol_dual * scale) {
      out.converged = true;
      break;
    }
    if (cfg.polish && cfg.polish_every > 0 && it % cfg.polish_every == 0 && polish_pending(c)) {
      done = true;
      break;
    }
    if (cfg.rho > 1.0) {
      mu *= cfg.rho;
      factor = std::make_unique<RidgeFactor>(x, gram, kNoMask, lambda, mu);
    }
  }
  if (cfg.polish && !done) done = polish_pending(c);
  if (done) out.converged = true;

  for (Eigen::Index i = 0; i < n_samples; ++i) {
    if (certified[static_cast<std::size_t>(i)]) {
      c.col(i) = fixed.col(i);
    } else {
      worst_kkt = std::max(worst_kkt, kkt_violation(column_problem(i), c.col(i), cfg.support_rel));
    }
  }
  out.polished_columns = num_certified;
  out.kkt_residual = worst_kkt;
  c.diagonal().setZero();
  out.objective = matrix_objective(x, c, lambda);
  out.coefficients = CoefficientMatrix(std::move(c));
  return out;
}

MatrixSolution solve_self_expression(const Matrix& x, const SolveConfig& cfg, const Matrix* warm_start) {
  return cfg.mode == SolveMode::column ? solve_columnwise(x, cfg, warm_start) : solve_matrix(x, cfg, warm_start);
}

DualCertificate recover_dual(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Matrix>& dictionary,
                             const Eigen::Ref<const Vector>& c, double lambda, const Matrix* basis,
                             double support_rel) {
  if (dictionary.rows() != x.size() || dictionary.cols() != c.size()) {
    throw Error(ErrorCode::DimensionMismatch, "recover_dual: incompatible shapes");
  }
  DualCertificate cert;
  cert.nu = lambda * (x - dictionary * c);
  const double eps = support_eps(c, support_rel);
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (std::abs(c[j]) > eps) cert.support.push_back(j);
  }
  if (basis) {
    cert.nu_in = project_onto(*basis, cert.nu);
    cert.nu_perp = cert.nu - *cert.nu_in;
  }
  return cert;
}

CertificateReport verify_certificate(const DualCertificate& cert, const Eigen::Ref<const Matrix>& dictionary,
                                     const Eigen::Ref<const Vector>& c, double tol) {
  if (dictionary.rows() != cert.nu.size() || dictionary.cols() != c.size()) {
    throw Error(ErrorCode::DimensionMismatch, "verify_certificate: incompatible shapes");
  }
  const Vector g = dictionary.transpose() * cert.nu;
  std::vector<char> on_support(static_cast<std::size_t>(c.size()), 0);
  CertificateReport rep;
  for (auto j : cert.support) {
    on_support[static_cast<std::size_t>(j)] = 1;
    rep.max_sign_error = std::max(rep.max_sign_error, std::abs(g[j] - sign_of(c[j])));
  }
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    rep.max_abs_correlation = std::max(rep.max_abs_correlation, std::abs(g[j]));
    if (!on_support[static_cast<std::size_t>(j)]) {
      rep.max_abs_inactive = std::max(rep.max_abs_inactive, std::abs(g[j]));
    }
  }
  rep.sign_match = rep.max_sign_error <= tol;
  rep.box_ok = rep.max_abs_correlation <= 1.0 + tol;
  return rep;
}

double min_nontrivial_lambda(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Matrix>& dictionary) {
  if (dictionary.cols() < 1) throw Error(ErrorCode::InvalidInput, "dictionary is empty");
  if (dictionary.rows() != x.size()) throw Error(ErrorCode::DimensionMismatch, "dictionary rows differ from x");
  const double corr = (dictionary.transpose() * x).cwiseAbs().maxCoeff();
  if (corr <= 1e-12) {
    throw Error(ErrorCode::DegenerateDictionary, "x is orthogonal to every dictionary column");
  }
  return 1.0 / corr;
}

}  // namespace ssc::solver
