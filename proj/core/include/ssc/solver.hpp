#pragma once

// ADMM solvers for the LASSO self-expression program
//
//     min_c ||c||_1 + (lambda/2) ||x - A c||^2
//
// solved either column by column (A = X with column i masked out) or jointly
// as the matrix program min ||C||_1 + (lambda/2)||X - XC||_F^2, diag(C) = 0.
//
// Both modes finish with an optional active-set polish: the support and signs
// found by ADMM are used to solve the reduced optimality system exactly, and the
// result is accepted only if it satisfies the full KKT conditions
// (A_S^T nu = sign(c_S), ||A^T nu||_inf <= 1 + tol, nu = lambda (x - A c)).
// A certified polish also terminates ADMM early.

#include "ssc/core.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace ssc::solver {

enum class SolveMode { column, matrix };

const char* to_string(SolveMode mode);
SolveMode parse_solve_mode(const std::string& s);

struct SolveConfig {
  double lambda = 1.0;
  /// ADMM penalty; <= 0 means "use lambda".
  double mu0 = 0.0;
  double rho = 1.0;
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  int max_iter = 2000;
  SolveMode mode = SolveMode::matrix;
  /// Run the active-set KKT polish at the end and every `polish_every`
  /// iterations (0 disables the periodic check).
  bool polish = true;
  int polish_every = 10;
  /// Relative support cut: |c_j| > support_rel * max(1, ||c||_inf).
  double support_rel = 1e-6;

  double effective_mu0() const { return mu0 > 0.0 ? mu0 : lambda; }
  /// Throws InvalidInput unless lambda > 0, mu0 >= 0, rho >= 1, tolerances > 0.
  void validate() const;
};

double support_eps(const Eigen::Ref<const Vector>& c, double support_rel = 1e-6);

/// ||c||_1 + (lambda/2)||x - A c||^2
double lasso_objective(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Matrix>& dictionary,
                       const Eigen::Ref<const Vector>& c, double lambda);

/// ||C||_1 + (lambda/2)||X - XC||_F^2
double matrix_objective(const Matrix& x, const Matrix& c, double lambda);

struct ColumnSolution {
  Vector coefficients;
  Vector residual;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  bool polished = false;
  /// Max KKT violation of the returned coefficients.
  double kkt_residual = 0.0;
};

/// Solves one LASSO column against an arbitrary dictionary (>= 1 column).
/// A non-converged result is returned with converged = false rather than
/// thrown. Throws NonFinite if the iterates diverge.
ColumnSolution solve_column(const Eigen::Ref<const Vector>& x,
                            const Eigen::Ref<const Matrix>& dictionary, const SolveConfig& cfg);

struct MatrixSolution {
  CoefficientMatrix coefficients;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Columns whose final coefficients passed the exact KKT polish.
  std::size_t polished_columns = 0;
  double kkt_residual = 0.0;
  SolveMode mode = SolveMode::matrix;
};

/// Column mode over the whole data set: column i is solved against X_{-i}
/// (column i masked, not copied).
///
/// All three drivers accept an optional N x N warm start (typically the
/// solution at a nearby lambda). It is polished first and accepted only if it
/// certifies the KKT conditions; otherwise ADMM runs from zero as usual.
MatrixSolution solve_columnwise(const Matrix& x, const SolveConfig& cfg, const Matrix* warm_start = nullptr);

/// Matrix-LASSO-SSC ADMM (J / C / Lambda splitting). Throws CholeskyFailure if
/// lambda X^T X + mu I cannot be factorized even after jitter.
MatrixSolution solve_matrix(const Matrix& x, const SolveConfig& cfg, const Matrix* warm_start = nullptr);

/// Dispatches on cfg.mode.
MatrixSolution solve_self_expression(const Matrix& x, const SolveConfig& cfg,
                                     const Matrix* warm_start = nullptr);

struct DualCertificate {
  Vector nu;
  /// P_S nu and P_{S^perp} nu; present only when a basis was supplied.
  std::optional<Vector> nu_in;
  std::optional<Vector> nu_perp;
  std::vector<Eigen::Index> support;
};

/// nu = lambda (x - A c); support = {j : |c_j| > support_eps(c)}.
DualCertificate recover_dual(const Eigen::Ref<const Vector>& x,
                             const Eigen::Ref<const Matrix>& dictionary,
                             const Eigen::Ref<const Vector>& c, double lambda,
                             const Matrix* basis = nullptr, double support_rel = 1e-6);

struct CertificateReport {
  bool sign_match = false;
  bool box_ok = false;
  /// max over off-support j of |a_j^T nu| (0 when every column is in the support)
  double max_abs_inactive = 0.0;
  /// max over the support of |a_j^T nu - sign(c_j)|
  double max_sign_error = 0.0;
  /// max_j |a_j^T nu|
  double max_abs_correlation = 0.0;
};

CertificateReport verify_certificate(const DualCertificate& cert,
                                     const Eigen::Ref<const Matrix>& dictionary,
                                     const Eigen::Ref<const Vector>& c, double tol);

/// 1 / ||A^T x||_inf: above this lambda the solution is non-zero, at or below
/// it c = 0 is optimal. Throws DegenerateDictionary if ||A^T x||_inf <= 1e-12.
double min_nontrivial_lambda(const Eigen::Ref<const Vector>& x,
                             const Eigen::Ref<const Matrix>& dictionary);

}  // namespace ssc::solver
