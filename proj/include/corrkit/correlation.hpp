#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "corrkit/garch.hpp"

namespace corrkit {

enum class CorrKind { CCC, DCC, NLARC };

std::string to_string(CorrKind kind);

struct DccParams {
  double a = 0.0;  // >= 0
  double b = 0.0;  // >= 0, a + b < 1

  bool valid() const { return a >= 0.0 && b >= 0.0 && a + b < 1.0; }
};

struct NlarcParams {
  double a = 0.0;
  double b = 0.0;
  double phi_a = 0.0;  // >= 0

  bool valid() const { return a >= 0.0 && b >= 0.0 && a + b < 1.0 && phi_a >= 0.0; }
};

struct CorrelationPath {
  std::vector<Eigen::MatrixXd> matrices;    // R_t, unit diagonal
  std::vector<Eigen::MatrixXd> q_matrices;  // Q_t
  double min_eigenvalue = 0.0;  // running minimum over all R_t (if computed)
  bool eigenvalues_computed = false;
};

struct TargetResult {
  Eigen::MatrixXd r_bar;
  bool converged = false;
  int iterations = 0;
};

struct CorrFit {
  CorrKind kind = CorrKind::CCC;
  Eigen::VectorXd params;     // () / (a, b) / (a, b, phi_a)
  Eigen::MatrixXd r_bar;      // targeted unconditional correlation
  CorrelationPath path;
  double loglik = 0.0;
  Eigen::VectorXd robust_se;  // aligned with params; NaN when unavailable
  int n_params = 0;
  bool converged = false;
  bool boundary = false;           // optimum pinned at a = 0
  bool target_converged = true;    // R-bar fixed point reached
};

// Per-pair news-impact gate: A[i][j] = exp(phi_a * (r_prev[i][j] - 1)).
Eigen::MatrixXd hadamard_gate(const Eigen::MatrixXd& r_prev, double phi_a);

// Q_t = (1-a-b) R_bar + a Qd_{t-1} e_{t-1} e'_{t-1} Qd_{t-1} + b Q_{t-1},
// R_t = Qd_t^{-1} Q_t Qd_t^{-1}, Q_1 = R_bar. want_eigenvalues controls the
// positive-definiteness certificate (skipped inside optimization loops).
CorrelationPath dcc_filter(const Eigen::MatrixXd& eps, const DccParams& params,
                           const Eigen::MatrixXd& r_bar,
                           bool want_eigenvalues = true);

// DCC recursion with the innovation term gated elementwise by
// hadamard_gate(R_{t-1}, phi_a); R_0 taken as R_bar. Nests dcc_filter at
// phi_a = 0.
CorrelationPath nlarc_filter(const Eigen::MatrixXd& eps,
                             const NlarcParams& params,
                             const Eigen::MatrixXd& r_bar,
                             bool want_eigenvalues = true);

// Gaussian log-likelihood of the de-GARCHed panel under the path; per-t
// log-determinant and solve come from one Cholesky factorization. Throws
// NumericError when some R_t is not positive definite.
double corr_loglik(const Eigen::MatrixXd& eps, const CorrelationPath& path);
Eigen::VectorXd corr_loglik_per_obs(const Eigen::MatrixXd& eps,
                                    const CorrelationPath& path);

// Correlation targeting: fixed point of the sample correlation of
// Qd_t eps_t under the model's own filter. Tolerance 1e-8, 50 iterations.
TargetResult target_r_bar(const Eigen::MatrixXd& eps, CorrKind kind,
                          const Eigen::VectorXd& params);

CorrFit ccc_estimate(const DegarchPanel& eps);

// Constrained ML over (a, b[, phi_a]) with R_bar profiled per evaluation;
// fixed multi-start grid; boundary optima (a = 0) detected and flagged.
CorrFit fit_corr(const DegarchPanel& eps, CorrKind kind);

}  // namespace corrkit
