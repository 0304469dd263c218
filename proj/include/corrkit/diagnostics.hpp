#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

namespace corrkit {

struct AdfResult {
  double statistic = 0.0;
  int lags_used = 0;
  // keys 1, 5, 10 (percent); values negative, 1% the most negative
  std::map<int, double> critical_values;
  bool reject_unit_root_at_5pct = false;
};

struct ArmaSpec {
  int p = 0;
  int q = 0;
};

struct ArmaFit {
  ArmaSpec spec;
  double intercept = 0.0;  // series mean in the mean-form parameterization
  std::vector<double> ar_coeffs;
  std::vector<double> ma_coeffs;
  Eigen::VectorXd residuals;  // same length as the input
  double sigma2 = 0.0;
  double loglik = 0.0;
  double aic = 0.0;
  bool converged = false;
};

struct ArchLmResult {
  double statistic = 0.0;  // T * R^2
  int lags = 0;
  double p_value = 0.0;
  bool heteroskedastic_at_5pct = false;
};

// Daily-data default: one business week of lags.
inline constexpr int kDefaultArchLmLags = 5;

// Schwert-style default maximum lag for the ADF regression.
int adf_default_max_lag(int t_obs);

// ADF with constant, no trend. Lag order picked by AIC over 0..max_lag;
// statistic is the t-ratio on the lagged level. max_lag < 0 selects the
// default rule.
AdfResult adf_test(const Eigen::VectorXd& series, int max_lag = -1);

// Conditional Gaussian ML, pre-sample terms set to zero. Residuals cover the
// full sample length.
ArmaFit fit_arma(const Eigen::VectorXd& series, const ArmaSpec& spec);

// AIC over the (p, q) grid; ties broken by smaller p+q, then smaller q.
ArmaSpec select_arma_order(const Eigen::VectorXd& series, int p_max = 3,
                           int q_max = 3);

ArchLmResult arch_lm_test(const Eigen::VectorXd& residuals,
                          int lags = kDefaultArchLmLags);

}  // namespace corrkit
