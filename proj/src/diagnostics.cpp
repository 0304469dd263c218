#include "corrkit/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "corrkit/errors.hpp"
#include "corrkit/optim.hpp"
#include "corrkit/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace corrkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

void require_variation(const Eigen::VectorXd& x, const char* who) {
  const double m = x.mean();
  if ((x.array() - m).abs().maxCoeff() < 1e-14 * std::max(1.0, std::fabs(m)))
    throw InputError(std::string(who) + ": zero variance input");
}

// All roots of 1 - c1 z - ... - ck z^k outside the unit circle, i.e. the
// companion matrix of the lag polynomial has spectral radius < 1.
bool lag_poly_stable(const std::vector<double>& c) {
  int k = static_cast<int>(c.size());
  while (k > 0 && std::fabs(c[k - 1]) < 1e-12) --k;
  if (k == 0) return true;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) companion(0, i) = c[i];
  for (int i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
  const auto eigs = companion.eigenvalues();
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    if (std::abs(eigs(i)) >= 1.0 - 1e-9) return false;
  return true;
}

struct ArmaEval {
  Eigen::VectorXd residuals;
  double sigma2 = 0.0;
  double loglik = kNegInf;
};

// Mean-form recursion: (y_t - mu) = sum phi_i (y_{t-i} - mu) + e_t
//                                 + sum theta_j e_{t-j},
// with pre-sample (y - mu) and e taken as zero.
ArmaEval arma_residuals(const Eigen::VectorXd& y, double mu,
                        const std::vector<double>& phi,
                        const std::vector<double>& theta) {
  const int t_obs = static_cast<int>(y.size());
  const int p = static_cast<int>(phi.size());
  const int q = static_cast<int>(theta.size());
  ArmaEval eval;
  eval.residuals.resize(t_obs);
  double ssr = 0.0;
  for (int t = 0; t < t_obs; ++t) {
    double pred = 0.0;
    for (int i = 0; i < p; ++i)
      if (t - 1 - i >= 0) pred += phi[i] * (y(t - 1 - i) - mu);
    for (int j = 0; j < q; ++j)
      if (t - 1 - j >= 0) pred += theta[j] * eval.residuals(t - 1 - j);
    eval.residuals(t) = (y(t) - mu) - pred;
    ssr += eval.residuals(t) * eval.residuals(t);
  }
  if (!std::isfinite(ssr) || ssr <= 0.0) return eval;
  eval.sigma2 = ssr / t_obs;
  eval.loglik = -0.5 * t_obs * (kLog2Pi + std::log(eval.sigma2) + 1.0);
  return eval;
}

}  // namespace

int adf_default_max_lag(int t_obs) {
  return static_cast<int>(std::floor(12.0 * std::pow(t_obs / 100.0, 0.25)));
}

namespace {

struct AdfRegression {
  double statistic = 0.0;
  double aic = 0.0;
  int n_used = 0;
};

// Delta y_t on [1, y_{t-1}, Delta y_{t-1..k}] over rows start..end.
AdfRegression adf_regression(const Eigen::VectorXd& y, int k, int start_lag) {
  const int t_obs = static_cast<int>(y.size());
  Eigen::VectorXd dy = y.tail(t_obs - 1) - y.head(t_obs - 1);
  const int first = start_lag;  // index into dy
  const int n = static_cast<int>(dy.size()) - first;
  Eigen::MatrixXd x(n, 2 + k);
  Eigen::VectorXd lhs(n);
  for (int i = 0; i < n; ++i) {
    const int t = first + i;  // row in dy; dy(t) = y(t+1) - y(t)
    lhs(i) = dy(t);
    x(i, 0) = 1.0;
    x(i, 1) = y(t);  // lagged level
    for (int j = 0; j < k; ++j) x(i, 2 + j) = dy(t - 1 - j);
  }
  auto fit = stats::ols(x, lhs);
  AdfRegression reg;
  reg.statistic = fit.coef(1) / fit.std_errors(1);
  const double sig2_mle = fit.residuals.squaredNorm() / n;
  reg.aic = n * std::log(sig2_mle) + 2.0 * (2 + k);
  reg.n_used = n;
  return reg;
}

// MacKinnon (2010) response-surface critical values, constant-only case.
double adf_critical(int pct, int n) {
  const double inv = 1.0 / n, inv2 = inv * inv, inv3 = inv2 * inv;
  switch (pct) {
    case 1:  return -3.43035 - 6.5393 * inv - 16.786 * inv2 - 79.433 * inv3;
    case 5:  return -2.86154 - 2.8903 * inv - 4.234 * inv2 - 40.040 * inv3;
    case 10: return -2.56677 - 1.5384 * inv - 2.809 * inv2;
    default: throw InputError("adf_critical: pct must be 1, 5 or 10");
  }
}

}  // namespace

AdfResult adf_test(const Eigen::VectorXd& series, int max_lag) {
  const int t_obs = static_cast<int>(series.size());
  if (max_lag < 0) max_lag = adf_default_max_lag(t_obs);
  if (t_obs < max_lag + 10) {
    max_lag = std::max(0, t_obs - 10);
  }
  if (t_obs < 12) throw InputError("adf_test: series too short");
  require_variation(series, "adf_test");

  // lag selection on the common sample so AICs are comparable
  int best_lag = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= max_lag; ++k) {
    auto reg = adf_regression(series, k, max_lag);
    if (reg.aic < best_aic) {
      best_aic = reg.aic;
      best_lag = k;
    }
  }
  // final statistic on the full usable sample at the chosen lag
  auto final_reg = adf_regression(series, best_lag, best_lag);

  AdfResult result;
  result.statistic = final_reg.statistic;
  result.lags_used = best_lag;
  for (int pct : {1, 5, 10})
    result.critical_values[pct] = adf_critical(pct, final_reg.n_used);
  result.reject_unit_root_at_5pct =
      result.statistic < result.critical_values[5];
  return result;
}

ArmaFit fit_arma(const Eigen::VectorXd& series, const ArmaSpec& spec) {
  if (spec.p < 0 || spec.q < 0)
    throw InputError("fit_arma: negative order");
  const int t_obs = static_cast<int>(series.size());
  if (t_obs < 3 * (spec.p + spec.q) + 10)
    throw InputError("fit_arma: series too short for requested order");
  require_variation(series, "fit_arma");

  const int p = spec.p, q = spec.q;
  const double y_mean = series.mean();
  const double y_sd = std::sqrt((series.array() - y_mean).square().sum() / t_obs);

  ArmaFit fit;
  fit.spec = spec;

  if (p == 0 && q == 0) {
    auto eval = arma_residuals(series, y_mean, {}, {});
    fit.intercept = y_mean;
    fit.residuals = eval.residuals;
    fit.sigma2 = eval.sigma2;
    fit.loglik = eval.loglik;
    fit.aic = 2.0 * 2 - 2.0 * fit.loglik;
    fit.converged = true;
    return fit;
  }

  auto unpack = [&](const Eigen::VectorXd& theta, double& mu,
                    std::vector<double>& phi, std::vector<double>& ma) {
    mu = y_mean + theta(0) * y_sd;
    phi.assign(p, 0.0);
    ma.assign(q, 0.0);
    for (int i = 0; i < p; ++i) phi[i] = theta(1 + i);
    for (int j = 0; j < q; ++j) ma[j] = theta(1 + p + j);
  };

  optim::Objective objective = [&](const Eigen::VectorXd& theta) {
    double mu;
    std::vector<double> phi, ma;
    unpack(theta, mu, phi, ma);
    if (!lag_poly_stable(phi)) return kNegInf;       // stationarity
    std::vector<double> neg_ma(ma.size());
    for (std::size_t j = 0; j < ma.size(); ++j) neg_ma[j] = -ma[j];
    if (!lag_poly_stable(neg_ma)) return kNegInf;    // invertibility
    return arma_residuals(series, mu, phi, ma).loglik;
  };

  const int dim = 1 + p + q;
  const double start_coef[3] = {0.0, 0.1, -0.1};
  optim::Result best;
  best.f = kNegInf;
  for (double c : start_coef) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim);
    for (int i = 1; i < dim; ++i) x0(i) = c;
    auto res = optim::maximize(objective, x0);
    if (res.f > best.f) best = res;
  }
  if (!std::isfinite(best.f))
    throw NumericError("fit_arma: all starts failed");

  double mu;
  std::vector<double> phi, ma;
  unpack(best.x, mu, phi, ma);
  auto eval = arma_residuals(series, mu, phi, ma);
  fit.intercept = mu;
  fit.ar_coeffs = phi;
  fit.ma_coeffs = ma;
  fit.residuals = eval.residuals;
  fit.sigma2 = eval.sigma2;
  fit.loglik = eval.loglik;
  fit.aic = 2.0 * (p + q + 2) - 2.0 * fit.loglik;
  fit.converged = best.converged;
  return fit;
}

ArmaSpec select_arma_order(const Eigen::VectorXd& series, int p_max, int q_max) {
  if (p_max < 0 || q_max < 0)
    throw InputError("select_arma_order: negative grid bound");
  const int n_cells = (p_max + 1) * (q_max + 1);
  std::vector<double> aics(n_cells, std::numeric_limits<double>::infinity());

#pragma omp parallel for schedule(dynamic)
  for (int cell = 0; cell < n_cells; ++cell) {
    const ArmaSpec spec{cell / (q_max + 1), cell % (q_max + 1)};
    try {
      aics[cell] = fit_arma(series, spec).aic;
    } catch (const std::exception&) {
      // cell left at +inf
    }
  }

  // deterministic reduction: best AIC, ties to smaller p+q, then smaller q
  int best_cell = -1;
  for (int cell = 0; cell < n_cells; ++cell) {
    if (!std::isfinite(aics[cell])) continue;
    if (best_cell < 0) {
      best_cell = cell;
      continue;
    }
    const ArmaSpec cur{cell / (q_max + 1), cell % (q_max + 1)};
    const ArmaSpec best{best_cell / (q_max + 1), best_cell % (q_max + 1)};
    const double diff = aics[cell] - aics[best_cell];
    bool better = diff < -1e-10;
    if (std::fabs(diff) <= 1e-10) {
      if (cur.p + cur.q != best.p + best.q)
        better = cur.p + cur.q < best.p + best.q;
      else
        better = cur.q < best.q;
    }
    if (better) best_cell = cell;
  }
  if (best_cell < 0)
    throw NumericError("select_arma_order: all candidate fits failed");
  return ArmaSpec{best_cell / (q_max + 1), best_cell % (q_max + 1)};
}

ArchLmResult arch_lm_test(const Eigen::VectorXd& residuals, int lags) {
  const int t_obs = static_cast<int>(residuals.size());
  if (lags < 1) throw InputError("arch_lm_test: lags must be >= 1");
  if (t_obs < lags + 10) throw InputError("arch_lm_test: series too short");
  require_variation(residuals, "arch_lm_test");

  Eigen::VectorXd sq = residuals.array().square();
  const int n = t_obs - lags;
  Eigen::MatrixXd x(n, lags + 1);
  Eigen::VectorXd lhs(n);
  for (int i = 0; i < n; ++i) {
    lhs(i) = sq(lags + i);
    x(i, 0) = 1.0;
    for (int j = 0; j < lags; ++j) x(i, 1 + j) = sq(lags + i - 1 - j);
  }
  auto fit = stats::ols(x, lhs);

  ArchLmResult result;
  result.lags = lags;
  result.statistic = n * fit.r_squared;
  result.p_value = stats::chi2_sf(result.statistic, lags);
  result.heteroskedastic_at_5pct = result.p_value < 0.05;
  return result;
}

}  // namespace corrkit
