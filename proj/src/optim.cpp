#include "corrkit/optim.hpp"

#include <cmath>
#include <limits>

namespace corrkit::optim {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool finite(double v) { return std::isfinite(v); }
}  // namespace

Eigen::VectorXd gradient(const Objective& f, const Eigen::VectorXd& x,
                         double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd g(n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = rel_step * std::max(1.0, std::fabs(x(i)));
    xp(i) = x(i) + h;
    const double fp = f(xp);
    xp(i) = x(i) - h;
    const double fm = f(xp);
    xp(i) = x(i);
    if (finite(fp) && finite(fm)) {
      g(i) = (fp - fm) / (2.0 * h);
    } else if (finite(fp)) {
      g(i) = (fp - f(x)) / h;
    } else if (finite(fm)) {
      g(i) = (f(x) - fm) / h;
    } else {
      g(i) = 0.0;
    }
  }
  return g;
}

Eigen::MatrixXd hessian(const Objective& f, const Eigen::VectorXd& x,
                        double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd h_mat(n, n);
  Eigen::VectorXd step(n);
  for (Eigen::Index i = 0; i < n; ++i)
    step(i) = rel_step * std::max(1.0, std::fabs(x(i)));
  const double f0 = f(x);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double val;
      if (i == j) {
        xp(i) = x(i) + step(i);
        const double fpp = f(xp);
        xp(i) = x(i) - step(i);
        const double fmm = f(xp);
        xp(i) = x(i);
        val = (fpp - 2.0 * f0 + fmm) / (step(i) * step(i));
      } else {
        xp(i) = x(i) + step(i);
        xp(j) = x(j) + step(j);
        const double fpp = f(xp);
        xp(j) = x(j) - step(j);
        const double fpm = f(xp);
        xp(i) = x(i) - step(i);
        const double fmm = f(xp);
        xp(j) = x(j) + step(j);
        const double fmp = f(xp);
        xp(i) = x(i);
        xp(j) = x(j);
        val = (fpp - fpm - fmp + fmm) / (4.0 * step(i) * step(j));
      }
      h_mat(i, j) = val;
      h_mat(j, i) = val;
    }
  }
  return h_mat;
}

Result maximize(const Objective& f, const Eigen::VectorXd& x0,
                const Options& opts) {
  const Eigen::Index n = x0.size();
  Result res;
  res.x = x0;
  res.f = f(x0);
  if (!finite(res.f)) return res;  // infeasible start

  Eigen::MatrixXd inv_hess = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = gradient(f, res.x);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    res.iterations = iter;
    const double scale = std::max(1.0, std::fabs(res.f));
    if (g.lpNorm<Eigen::Infinity>() < opts.grad_tol * scale) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd direction = inv_hess * g;  // ascent
    double slope = g.dot(direction);
    if (!(slope > 0.0)) {  // not an ascent direction; reset
      inv_hess.setIdentity();
      direction = g;
      slope = g.squaredNorm();
      if (slope == 0.0) break;
    }

    // Armijo backtracking
    double alpha = 1.0;
    double f_new = kNegInf;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = res.x + alpha * direction;
      f_new = f(x_new);
      if (finite(f_new) && f_new >= res.f + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // no improving step at any length: at f-resolution this is the
      // optimum unless the gradient is still clearly non-zero
      res.converged = g.lpNorm<Eigen::Infinity>() < 1e-3 * scale;
      return res;
    }

    Eigen::VectorXd g_new = gradient(f, x_new);
    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd yk = g_new - g;  // note: gradient of f, maximizing
    const double sy = -s.dot(yk);    // curvature for -f
    if (sy > 1e-12) {
      // BFGS update on the inverse Hessian of -f
      const double rho = 1.0 / sy;
      Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      Eigen::MatrixXd v = eye + rho * s * yk.transpose();
      inv_hess = v * inv_hess * v.transpose() + rho * s * s.transpose();
    }
    res.x = x_new;
    res.f = f_new;
    g = g_new;
  }
  res.converged =
      g.lpNorm<Eigen::Infinity>() < opts.grad_tol * std::max(1.0, std::fabs(res.f));
  return res;
}

}  // namespace corrkit::optim
