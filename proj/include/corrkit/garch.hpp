#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "corrkit/diagnostics.hpp"
#include "corrkit/series.hpp"

namespace corrkit {

struct GarchParams {
  double omega = 0.0;  // > 0
  double alpha = 0.0;  // >= 0
  double beta = 0.0;   // >= 0, alpha + beta < 1

  bool valid() const {
    return omega > 0.0 && alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0;
  }
};

struct GarchFit {
  GarchParams params;
  Eigen::VectorXd h_path;  // conditional variances, strictly positive
  double loglik = 0.0;
  Eigen::Vector3d std_errors = Eigen::Vector3d::Zero();  // robust, (omega, alpha, beta)
  bool converged = false;
  bool used_garch = true;  // false: unconditional-scale fallback
};

struct DegarchPanel {
  std::vector<Date> dates;
  Eigen::MatrixXd residuals;  // T x N, approximately unit scale
  std::vector<std::string> names;
  std::vector<bool> used_garch;  // per-series scale provenance
};

inline constexpr int kGarchMinLength = 50;

// Variance recursion h2_t = omega + alpha y2_{t-1} + beta h2_{t-1},
// h2_1 = h0 (h0 <= 0 selects the sample variance of y).
Eigen::VectorXd garch_filter(const Eigen::VectorXd& y, const GarchParams& params,
                             double h0 = 0.0);

// Gaussian QML over the constrained region via an unconstrained
// reparameterization; 3 fixed starts, best kept; robust standard errors.
GarchFit fit_garch(const Eigen::VectorXd& y);

// Constant-variance fit at the sample variance (the fallback path for
// homoskedastic series).
GarchFit unconditional_fit(const Eigen::VectorXd& y);

// Elementwise y_t / h_t with h_t = sqrt of the fitted variance path.
Eigen::VectorXd degarch(const Eigen::VectorXd& y, const GarchFit& fit);

// Full first step: per series, fit the given ARMA spec, then GARCH-filter
// the residuals where flagged, else scale by the unconditional sd.
DegarchPanel first_step(const AlignedPanel& panel,
                        const std::vector<ArmaSpec>& arma_specs,
                        const std::vector<bool>& hetero_flags);

// Gaussian log-likelihood of y under a given variance path.
double garch_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& h_path);

}  // namespace corrkit
