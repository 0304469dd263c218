#pragma once

#include <Eigen/Dense>
#include <functional>

namespace corrkit::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Options {
  // Max-norm of the gradient, relative to max(1, |f|): numerical gradients
  // of an O(T) log-likelihood carry O(eps |f| / step) noise, so an absolute
  // tolerance is unreachable at scale.
  double grad_tol = 1e-6;
  int max_iter = 500;
};

struct Result {
  Eigen::VectorXd x;
  double f = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Maximizes f by BFGS with central-difference gradients and Armijo
// backtracking. f may return -inf to reject a point; such points are
// never accepted by the line search.
Result maximize(const Objective& f, const Eigen::VectorXd& x0,
                const Options& opts = {});

// Central-difference gradient, step scaled by max(1, |x_i|).
Eigen::VectorXd gradient(const Objective& f, const Eigen::VectorXd& x,
                         double rel_step = 1e-6);

// Central-difference Hessian of f at x.
Eigen::MatrixXd hessian(const Objective& f, const Eigen::VectorXd& x,
                        double rel_step = 1e-5);

}  // namespace corrkit::optim
