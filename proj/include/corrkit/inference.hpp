#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "corrkit/garch.hpp"
#include "corrkit/optim.hpp"

namespace corrkit {

struct LrResult {
  double statistic = 0.0;  // max(0, 2 (L_u - L_r))
  int dof = 1;
  double critical_value_10pct = 0.0;
  bool reject = false;
};

struct RollingPath {
  int window = 5;
  std::vector<Date> dates;                 // one per window end
  std::vector<std::pair<int, int>> pairs;  // column index pairs (i < j)
  // rows: windows, cols: pairs; NaN where a window has zero variance
  Eigen::MatrixXd values;
};

// Per-observation log-likelihood contributions as a function of the
// parameter vector; rows of the returned vector index observations.
using PerObsLoglik = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Forward-difference score matrix (T x k), step 1e-5 * max(1, |theta|); falls
// back to a backward step when the forward point is infeasible.
Eigen::MatrixXd per_obs_scores(const PerObsLoglik& fn,
                               const Eigen::VectorXd& theta_hat);

// White sandwich standard errors: A^{-1} B A^{-1} with A the Hessian of the
// total log-likelihood and B the outer product of per-observation scores.
// Coordinates listed in `pinned` (boundary parameters) get SE 0, with the
// sandwich computed on the free subspace.
Eigen::VectorXd robust_se(const optim::Objective& total_loglik,
                          const Eigen::VectorXd& theta_hat,
                          const Eigen::MatrixXd& scores,
                          const std::vector<int>& pinned = {});

LrResult lr_test(double l_restricted, double l_unrestricted, int dof);

// Per-observation AIC, (2k - 2 loglik) / T.
double aic(double loglik, int n_params, int t_obs);

RollingPath rolling_correlation(const DegarchPanel& eps, int window = 5);

}  // namespace corrkit
