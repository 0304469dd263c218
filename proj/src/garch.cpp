#include "corrkit/garch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "corrkit/errors.hpp"
#include "corrkit/inference.hpp"
#include "corrkit/optim.hpp"
#include "corrkit/stats.hpp"

namespace corrkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

double sample_variance_mle(const Eigen::VectorXd& y) {
  const double m = y.mean();
  return (y.array() - m).square().sum() / y.size();
}

// omega = exp(t0); persistence s = sigmoid(t1) in (0,1) split between alpha
// and beta by f = sigmoid(t2). Every iterate lands inside
// {omega>0, alpha>=0, beta>=0, alpha+beta<1}.
GarchParams from_unconstrained(const Eigen::Vector3d& theta) {
  // clamps keep exp/sigmoid away from 0 and 1 exactly, so every point the
  // optimizer can visit maps to strictly valid parameters
  const double t0 = std::clamp(theta(0), -690.0, 690.0);
  const double t1 = std::clamp(theta(1), -30.0, 30.0);
  const double t2 = std::clamp(theta(2), -30.0, 30.0);
  const double s = 1.0 / (1.0 + std::exp(-t1));
  const double f = 1.0 / (1.0 + std::exp(-t2));
  GarchParams params;
  params.omega = std::exp(t0);
  params.alpha = s * f;
  params.beta = s * (1.0 - f);
  return params;
}

Eigen::Vector3d to_unconstrained(const GarchParams& params) {
  const double s = params.alpha + params.beta;
  const double f = params.alpha / s;
  auto logit = [](double x) { return std::log(x / (1.0 - x)); };
  return {std::log(params.omega), logit(s), logit(f)};
}

}  // namespace

Eigen::VectorXd garch_filter(const Eigen::VectorXd& y, const GarchParams& params,
                             double h0) {
  if (!params.valid()) throw InputError("garch_filter: invalid parameters");
  if (!y.allFinite()) throw InputError("garch_filter: non-finite input");
  const Eigen::Index t_obs = y.size();
  Eigen::VectorXd h(t_obs);
  h(0) = (h0 > 0.0) ? h0 : sample_variance_mle(y);
  for (Eigen::Index t = 1; t < t_obs; ++t)
    h(t) = params.omega + params.alpha * y(t - 1) * y(t - 1) +
           params.beta * h(t - 1);
  return h;
}

double garch_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& h_path) {
  double ll = 0.0;
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    if (!(h_path(t) > 0.0)) return kNegInf;
    ll += -0.5 * (kLog2Pi + std::log(h_path(t)) + y(t) * y(t) / h_path(t));
  }
  return ll;
}

GarchFit unconditional_fit(const Eigen::VectorXd& y) {
  const double var = (y.array() - y.mean()).square().sum() / (y.size() - 1);
  if (!(var > 0.0)) throw InputError("unconditional_fit: zero variance");
  GarchFit fit;
  fit.params = GarchParams{var, 0.0, 0.0};
  fit.h_path = Eigen::VectorXd::Constant(y.size(), var);
  fit.loglik = garch_loglik(y, fit.h_path);
  fit.converged = true;
  fit.used_garch = false;
  return fit;
}

GarchFit fit_garch(const Eigen::VectorXd& y) {
  const int t_obs = static_cast<int>(y.size());
  if (t_obs < kGarchMinLength)
    throw InputError("fit_garch: need at least " +
                     std::to_string(kGarchMinLength) + " observations");
  const double var = sample_variance_mle(y);
  if (!(var > 0.0)) throw InputError("fit_garch: zero variance");

  optim::Objective objective = [&](const Eigen::VectorXd& theta) {
    const GarchParams params = from_unconstrained(theta);
    return garch_loglik(y, garch_filter(y, params));
  };

  // fixed multi-start; omega from variance targeting at each start
  const double starts[3][2] = {{0.05, 0.90}, {0.10, 0.80}, {0.02, 0.95}};
  optim::Result best;
  best.f = kNegInf;
  for (const auto& s : starts) {
    GarchParams init{var * (1.0 - s[0] - s[1]), s[0], s[1]};
    auto res = optim::maximize(objective, to_unconstrained(init));
    if (res.f > best.f) best = res;
  }

  GarchFit fit;
  fit.params = from_unconstrained(best.x);
  fit.h_path = garch_filter(y, fit.params);
  fit.loglik = best.f;
  fit.converged = best.converged && std::isfinite(best.f);
  if (!fit.converged) return fit;

  // robust SEs in the original (omega, alpha, beta) space
  auto params_loglik = [&](const Eigen::VectorXd& p) {
    GarchParams params{p(0), p(1), p(2)};
    if (!params.valid()) return kNegInf;
    return garch_loglik(y, garch_filter(y, params));
  };
  PerObsLoglik per_obs = [&](const Eigen::VectorXd& p) {
    GarchParams params{p(0), p(1), p(2)};
    if (!params.valid())
      return Eigen::VectorXd::Constant(t_obs, kNegInf).eval();
    Eigen::VectorXd h = garch_filter(y, params);
    Eigen::VectorXd ll(t_obs);
    for (int t = 0; t < t_obs; ++t)
      ll(t) = -0.5 * (kLog2Pi + std::log(h(t)) + y(t) * y(t) / h(t));
    return ll;
  };
  Eigen::Vector3d theta_hat{fit.params.omega, fit.params.alpha, fit.params.beta};
  try {
    Eigen::MatrixXd scores = per_obs_scores(per_obs, theta_hat);
    fit.std_errors = robust_se(params_loglik, theta_hat, scores);
  } catch (const NumericError&) {
    fit.std_errors.setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  return fit;
}

Eigen::VectorXd degarch(const Eigen::VectorXd& y, const GarchFit& fit) {
  if (y.size() != fit.h_path.size())
    throw InputError("degarch: length mismatch");
  if (!(fit.h_path.array() > 0.0).all())
    throw InputError("degarch: variance path must be strictly positive");
  return y.array() / fit.h_path.array().sqrt();
}

DegarchPanel first_step(const AlignedPanel& panel,
                        const std::vector<ArmaSpec>& arma_specs,
                        const std::vector<bool>& hetero_flags) {
  const Eigen::Index n = panel.cols();
  if (arma_specs.size() != static_cast<std::size_t>(n) ||
      hetero_flags.size() != static_cast<std::size_t>(n))
    throw InputError("first_step: one spec and one flag per column required");

  DegarchPanel out;
  out.dates = panel.dates;
  out.names = panel.names;
  out.residuals.resize(panel.rows(), n);
  out.used_garch.assign(n, false);
  std::vector<std::string> failures(n);

#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index c = 0; c < n; ++c) {
    try {
      ArmaFit arma = fit_arma(panel.values.col(c), arma_specs[c]);
      GarchFit scale;
      bool garch_used = false;
      if (hetero_flags[c] && arma.residuals.size() >= kGarchMinLength) {
        scale = fit_garch(arma.residuals);
        garch_used = scale.converged;
      }
      if (!garch_used) scale = unconditional_fit(arma.residuals);
      out.residuals.col(c) = degarch(arma.residuals, scale);
      out.used_garch[c] = garch_used;
    } catch (const std::exception& e) {
      failures[c] = e.what();
    }
  }
  for (Eigen::Index c = 0; c < n; ++c)
    if (!failures[c].empty())
      throw NumericError("first_step: series '" + panel.names[c] +
                         "' failed: " + failures[c]);
  return out;
}

}  // namespace corrkit
