#include "corrkit/inference.hpp"

#include <cmath>
#include <limits>

#include "corrkit/errors.hpp"
#include "corrkit/stats.hpp"

namespace corrkit {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

Eigen::MatrixXd per_obs_scores(const PerObsLoglik& fn,
                               const Eigen::VectorXd& theta_hat) {
  const Eigen::VectorXd base = fn(theta_hat);
  const Eigen::Index t_obs = base.size();
  const Eigen::Index k = theta_hat.size();
  Eigen::MatrixXd scores(t_obs, k);
  Eigen::VectorXd theta = theta_hat;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double h = 1e-5 * std::max(1.0, std::fabs(theta_hat(j)));
    theta(j) = theta_hat(j) + h;
    Eigen::VectorXd bumped = fn(theta);
    double sign = 1.0;
    if (!bumped.allFinite()) {  // forward step left the feasible region
      theta(j) = theta_hat(j) - h;
      bumped = fn(theta);
      sign = -1.0;
      if (!bumped.allFinite())
        throw NumericError("per_obs_scores: infeasible in both directions");
    }
    theta(j) = theta_hat(j);
    scores.col(j) = sign * (bumped - base) / h;
  }
  return scores;
}

Eigen::VectorXd robust_se(const optim::Objective& total_loglik,
                          const Eigen::VectorXd& theta_hat,
                          const Eigen::MatrixXd& scores,
                          const std::vector<int>& pinned) {
  const Eigen::Index k = theta_hat.size();
  std::vector<int> free_idx;
  for (Eigen::Index j = 0; j < k; ++j) {
    bool is_pinned = false;
    for (int p : pinned) is_pinned |= (p == static_cast<int>(j));
    if (!is_pinned) free_idx.push_back(static_cast<int>(j));
  }
  Eigen::VectorXd se = Eigen::VectorXd::Zero(k);
  if (free_idx.empty()) return se;

  // Hessian of the total log-likelihood restricted to the free coordinates.
  optim::Objective restricted = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd full = theta_hat;
    for (std::size_t i = 0; i < free_idx.size(); ++i) full(free_idx[i]) = x(i);
    return total_loglik(full);
  };
  Eigen::VectorXd x_free(free_idx.size());
  for (std::size_t i = 0; i < free_idx.size(); ++i)
    x_free(static_cast<Eigen::Index>(i)) = theta_hat(free_idx[i]);
  Eigen::MatrixXd a_mat = optim::hessian(restricted, x_free);

  Eigen::MatrixXd s_free(scores.rows(), free_idx.size());
  for (std::size_t i = 0; i < free_idx.size(); ++i)
    s_free.col(static_cast<Eigen::Index>(i)) = scores.col(free_idx[i]);
  Eigen::MatrixXd b_mat = s_free.transpose() * s_free;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a_mat);
  if (!lu.isInvertible())
    throw NumericError("robust_se: non-invertible Hessian");
  Eigen::MatrixXd a_inv = lu.inverse();
  Eigen::MatrixXd cov = a_inv * b_mat * a_inv;
  for (std::size_t i = 0; i < free_idx.size(); ++i) {
    const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    se(free_idx[i]) = (v >= 0.0) ? std::sqrt(v) : kNaN;
  }
  return se;
}

LrResult lr_test(double l_restricted, double l_unrestricted, int dof) {
  if (dof < 1) throw InputError("lr_test: dof must be >= 1");
  LrResult result;
  result.statistic = std::max(0.0, 2.0 * (l_unrestricted - l_restricted));
  result.dof = dof;
  // Table constants for the common cases, general fallback otherwise.
  if (dof == 1) result.critical_value_10pct = 2.706;
  else if (dof == 2) result.critical_value_10pct = 4.605;
  else result.critical_value_10pct = stats::chi2_critical(0.10, dof);
  result.reject = result.statistic > result.critical_value_10pct;
  return result;
}

double aic(double loglik, int n_params, int t_obs) {
  if (t_obs <= 0) throw InputError("aic: t_obs must be positive");
  return (2.0 * n_params - 2.0 * loglik) / t_obs;
}

RollingPath rolling_correlation(const DegarchPanel& eps, int window) {
  const Eigen::Index t_obs = eps.residuals.rows();
  const Eigen::Index n = eps.residuals.cols();
  if (window < 2) throw InputError("rolling_correlation: window must be >= 2");
  if (t_obs < window) throw InputError("rolling_correlation: panel shorter than window");

  RollingPath path;
  path.window = window;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      path.pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
  const Eigen::Index n_windows = t_obs - window + 1;
  path.values.resize(n_windows, static_cast<Eigen::Index>(path.pairs.size()));
  if (!eps.dates.empty())
    path.dates.assign(eps.dates.begin() + (window - 1), eps.dates.end());

  for (Eigen::Index w = 0; w < n_windows; ++w) {
    for (std::size_t pi = 0; pi < path.pairs.size(); ++pi) {
      const auto [i, j] = path.pairs[pi];
      const auto x = eps.residuals.col(i).segment(w, window);
      const auto y = eps.residuals.col(j).segment(w, window);
      const double mx = x.mean(), my = y.mean();
      const double sxx = (x.array() - mx).square().sum();
      const double syy = (y.array() - my).square().sum();
      const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
      path.values(w, static_cast<Eigen::Index>(pi)) =
          (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : kNaN;
    }
  }
  return path;
}

}  // namespace corrkit
