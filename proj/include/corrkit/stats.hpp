#pragma once

#include <Eigen/Dense>
#include <vector>

namespace corrkit::stats {

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // denominator n-1
double sample_sd(const std::vector<double>& x);

// Pearson correlation of two equal-length vectors.
double correlation(const std::vector<double>& x, const std::vector<double>& y);

// Sample correlation matrix of the columns of a T x N matrix.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data);

// Upper tail of the chi-squared distribution, P(X > x), dof k.
double chi2_sf(double x, int dof);
// Critical value for upper-tail probability p (e.g. p = 0.10).
double chi2_critical(double p, int dof);

// Standard normal quantile (Wichura's AS241 algorithm, double precision).
double normal_quantile(double p);

struct OlsFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd residuals;
  Eigen::VectorXd std_errors;  // classical
  double r_squared = 0.0;
  double sigma2 = 0.0;  // residual variance, denominator n-k
};

// OLS of y on X (X includes any constant column the caller wants).
OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

}  // namespace corrkit::stats
