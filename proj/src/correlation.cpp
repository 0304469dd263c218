#include "corrkit/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corrkit/errors.hpp"
#include "corrkit/inference.hpp"
#include "corrkit/optim.hpp"
#include "corrkit/stats.hpp"

namespace corrkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLog2Pi = 1.8378770664093454836;

void check_r_bar(const Eigen::MatrixXd& r_bar) {
  if (r_bar.rows() != r_bar.cols())
    throw InputError("correlation: R_bar must be square");
  if ((r_bar.diagonal().array() - 1.0).abs().maxCoeff() > 1e-10)
    throw InputError("correlation: R_bar must have unit diagonal");
  if ((r_bar - r_bar.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("correlation: R_bar must be symmetric");
}

// Shared DCC/NLARC recursion; use_gate selects the nonlinear news-impact
// weighting. At phi_a = 0 the gate is exactly a matrix of ones, so both
// branches produce bit-identical paths.
CorrelationPath run_filter(const Eigen::MatrixXd& eps, double a, double b,
                           double phi_a, bool use_gate,
                           const Eigen::MatrixXd& r_bar,
                           bool want_eigenvalues) {
  check_r_bar(r_bar);
  const Eigen::Index t_obs = eps.rows();
  const Eigen::Index n = eps.cols();
  if (r_bar.rows() != n)
    throw InputError("correlation: R_bar dimension mismatch");

  CorrelationPath path;
  path.matrices.reserve(t_obs);
  path.q_matrices.reserve(t_obs);

  Eigen::MatrixXd q = r_bar;  // Q_1 = R_bar
  Eigen::MatrixXd r_prev = r_bar;  // R_0 = R_bar, feeds the first gate
  double min_eig = std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_solver;

  for (Eigen::Index t = 0; t < t_obs; ++t) {
    if (t > 0) {
      // Qd_{t-1} eps_{t-1}: scale the lagged shock by the lagged sqrt(q_ii)
      Eigen::VectorXd qd = path.q_matrices[t - 1].diagonal().cwiseSqrt();
      Eigen::VectorXd scaled = qd.cwiseProduct(eps.row(t - 1).transpose());
      Eigen::MatrixXd outer = scaled * scaled.transpose();
      if (use_gate)
        outer = hadamard_gate(r_prev, phi_a).cwiseProduct(outer).eval();
      q = ((1.0 - a - b) * r_bar + a * outer + b * path.q_matrices[t - 1]).eval();
    }
    Eigen::VectorXd d = q.diagonal().cwiseSqrt();
    if (!(d.array() > 0.0).all() || !q.allFinite())
      throw NumericError("correlation filter: non-finite state at t=" +
                         std::to_string(t + 1));
    Eigen::MatrixXd r = d.cwiseInverse().asDiagonal() * q *
                        d.cwiseInverse().asDiagonal();
    r = (0.5 * (r + r.transpose())).eval();
    r.diagonal().setOnes();
    if (want_eigenvalues) {
      eig_solver.compute(r, Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, eig_solver.eigenvalues().minCoeff());
    }
    path.q_matrices.push_back(q);
    path.matrices.push_back(r);
    r_prev = r;
  }
  if (want_eigenvalues) {
    path.min_eigenvalue = min_eig;
    path.eigenvalues_computed = true;
  }
  return path;
}

Eigen::MatrixXd sample_correlation_checked(const Eigen::MatrixXd& data) {
  Eigen::MatrixXd corr = stats::correlation_matrix(data);
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success)
    throw NumericError("correlation: singular correlation (collinear columns)");
  return corr;
}

struct ParamMap {
  CorrKind kind;

  int dim() const { return kind == CorrKind::NLARC ? 3 : 2; }

  // a + b < 1 through a logistic persistence split; phi_a through a log map.
  Eigen::VectorXd to_params(const Eigen::VectorXd& theta) const {
    // clamped so the optimizer can never reach a + b = 1 or phi_a = inf
    const double t0 = std::clamp(theta(0), -30.0, 30.0);
    const double t1 = std::clamp(theta(1), -30.0, 30.0);
    const double s = 1.0 / (1.0 + std::exp(-t0));
    const double f = 1.0 / (1.0 + std::exp(-t1));
    Eigen::VectorXd params(dim());
    params(0) = s * f;
    params(1) = s * (1.0 - f);
    if (kind == CorrKind::NLARC)
      params(2) = std::exp(std::clamp(theta(2), -690.0, 30.0));
    return params;
  }

  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& params) const {
    auto logit = [](double x) { return std::log(x / (1.0 - x)); };
    const double s = params(0) + params(1);
    Eigen::VectorXd theta(dim());
    theta(0) = logit(s);
    theta(1) = logit(params(0) / s);
    if (kind == CorrKind::NLARC) theta(2) = std::log(params(2));
    return theta;
  }
};

CorrelationPath filter_for(CorrKind kind, const Eigen::MatrixXd& eps,
                           const Eigen::VectorXd& params,
                           const Eigen::MatrixXd& r_bar,
                           bool want_eigenvalues) {
  if (kind == CorrKind::NLARC)
    return nlarc_filter(eps, {params(0), params(1), params(2)}, r_bar,
                        want_eigenvalues);
  return dcc_filter(eps, {params(0), params(1)}, r_bar, want_eigenvalues);
}

// Profiled log-likelihood at a parameter point: target R_bar, filter,
// evaluate. Non-PD or non-finite states reject the point with -inf.
double profiled_loglik(const Eigen::MatrixXd& eps, CorrKind kind,
                       const Eigen::VectorXd& params) {
  try {
    TargetResult target = target_r_bar(eps, kind, params);
    CorrelationPath path = filter_for(kind, eps, params, target.r_bar, false);
    return corr_loglik(eps, path);
  } catch (const NumericError&) {
    return kNegInf;
  }
}

}  // namespace

std::string to_string(CorrKind kind) {
  switch (kind) {
    case CorrKind::CCC: return "CCC";
    case CorrKind::DCC: return "DCC";
    case CorrKind::NLARC: return "NLARC";
  }
  return "?";
}

Eigen::MatrixXd hadamard_gate(const Eigen::MatrixXd& r_prev, double phi_a) {
  if (phi_a < 0.0) throw InputError("hadamard_gate: phi_a must be >= 0");
  return ((r_prev.array() - 1.0) * phi_a).exp().matrix();
}

CorrelationPath dcc_filter(const Eigen::MatrixXd& eps, const DccParams& params,
                           const Eigen::MatrixXd& r_bar,
                           bool want_eigenvalues) {
  if (!params.valid()) throw InputError("dcc_filter: invalid parameters");
  return run_filter(eps, params.a, params.b, 0.0, false, r_bar,
                    want_eigenvalues);
}

CorrelationPath nlarc_filter(const Eigen::MatrixXd& eps,
                             const NlarcParams& params,
                             const Eigen::MatrixXd& r_bar,
                             bool want_eigenvalues) {
  if (!params.valid()) throw InputError("nlarc_filter: invalid parameters");
  return run_filter(eps, params.a, params.b, params.phi_a, true, r_bar,
                    want_eigenvalues);
}

Eigen::VectorXd corr_loglik_per_obs(const Eigen::MatrixXd& eps,
                                    const CorrelationPath& path) {
  const Eigen::Index t_obs = eps.rows();
  const Eigen::Index n = eps.cols();
  if (static_cast<Eigen::Index>(path.matrices.size()) != t_obs)
    throw InputError("corr_loglik: path length mismatch");
  Eigen::VectorXd ll(t_obs);
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (Eigen::Index t = 0; t < t_obs; ++t) {
    llt.compute(path.matrices[t]);
    if (llt.info() != Eigen::Success)
      throw NumericError("corr_loglik: R_t not positive definite at t=" +
                         std::to_string(t + 1));
    const Eigen::MatrixXd l_factor = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      log_det += 2.0 * std::log(l_factor(i, i));
    const Eigen::VectorXd solved = llt.solve(eps.row(t).transpose());
    const double quad = eps.row(t).dot(solved);
    ll(t) = -0.5 * (n * kLog2Pi + log_det + quad);
  }
  return ll;
}

double corr_loglik(const Eigen::MatrixXd& eps, const CorrelationPath& path) {
  return corr_loglik_per_obs(eps, path).sum();
}

TargetResult target_r_bar(const Eigen::MatrixXd& eps, CorrKind kind,
                          const Eigen::VectorXd& params) {
  TargetResult result;
  result.r_bar = sample_correlation_checked(eps);
  if (kind == CorrKind::CCC) {
    result.converged = true;
    return result;
  }
  const Eigen::Index t_obs = eps.rows();
  for (int iter = 0; iter < 50; ++iter) {
    result.iterations = iter + 1;
    CorrelationPath path = filter_for(kind, eps, params, result.r_bar, false);
    Eigen::MatrixXd rescaled(t_obs, eps.cols());
    for (Eigen::Index t = 0; t < t_obs; ++t) {
      Eigen::VectorXd qd = path.q_matrices[t].diagonal().cwiseSqrt();
      rescaled.row(t) = qd.cwiseProduct(eps.row(t).transpose()).transpose();
    }
    Eigen::MatrixXd next = sample_correlation_checked(rescaled);
    const double change = (next - result.r_bar).cwiseAbs().maxCoeff();
    result.r_bar = next;
    if (change < 1e-8) {
      result.converged = true;
      return result;
    }
  }
  return result;  // last iterate, converged = false
}

CorrFit ccc_estimate(const DegarchPanel& eps) {
  const Eigen::MatrixXd& data = eps.residuals;
  if (data.rows() <= data.cols())
    throw InputError("ccc_estimate: need T > N");
  CorrFit fit;
  fit.kind = CorrKind::CCC;
  fit.n_params = 0;
  fit.params.resize(0);
  fit.robust_se.resize(0);
  fit.r_bar = sample_correlation_checked(data);
  fit.path = dcc_filter(data, {0.0, 0.0}, fit.r_bar, true);
  fit.loglik = corr_loglik(data, fit.path);
  fit.converged = true;
  return fit;
}

CorrFit fit_corr(const DegarchPanel& eps, CorrKind kind) {
  if (kind == CorrKind::CCC) return ccc_estimate(eps);
  const Eigen::MatrixXd& data = eps.residuals;
  if (data.rows() <= data.cols() + 5)
    throw InputError("fit_corr: need T > N + 5");

  const ParamMap map{kind};
  optim::Objective objective = [&](const Eigen::VectorXd& theta) {
    return profiled_loglik(data, kind, map.to_params(theta));
  };

  const double ab_starts[3][2] = {{0.02, 0.95}, {0.05, 0.90}, {0.10, 0.80}};
  const double phi_starts[3] = {0.1, 1.0, 5.0};
  std::vector<Eigen::VectorXd> starts;
  for (const auto& ab : ab_starts) {
    if (kind == CorrKind::DCC) {
      Eigen::VectorXd p(2);
      p << ab[0], ab[1];
      starts.push_back(map.to_unconstrained(p));
    } else {
      for (double phi : phi_starts) {
        Eigen::VectorXd p(3);
        p << ab[0], ab[1], phi;
        starts.push_back(map.to_unconstrained(p));
      }
    }
  }

  // NLARC nests DCC at phi_a = 0: fit the nested model first, seed a start
  // from its optimum, and never report a fit below the nested one.
  Eigen::VectorXd dcc_opt;
  if (kind == CorrKind::NLARC) {
    const ParamMap dcc_map{CorrKind::DCC};
    optim::Objective dcc_objective = [&](const Eigen::VectorXd& theta) {
      return profiled_loglik(data, CorrKind::DCC, dcc_map.to_params(theta));
    };
    optim::Result dcc_best;
    dcc_best.f = kNegInf;
    for (const auto& ab : ab_starts) {
      Eigen::VectorXd p(2);
      p << ab[0], ab[1];
      auto res = optim::maximize(dcc_objective, dcc_map.to_unconstrained(p));
      if (res.f > dcc_best.f) dcc_best = res;
    }
    if (std::isfinite(dcc_best.f)) {
      dcc_opt = dcc_map.to_params(dcc_best.x);
      Eigen::VectorXd p(3);
      p << dcc_opt(0), dcc_opt(1), 0.01;
      starts.push_back(map.to_unconstrained(p));
    }
  }

  optim::Result best;
  best.f = kNegInf;
  for (const auto& start : starts) {
    auto res = optim::maximize(objective, start);
    if (res.f > best.f) best = res;
  }
  if (!std::isfinite(best.f))
    throw NumericError("fit_corr: all starts failed");

  CorrFit fit;
  fit.kind = kind;
  fit.n_params = map.dim();
  fit.params = map.to_params(best.x);
  fit.converged = best.converged;
  fit.loglik = best.f;

  if (dcc_opt.size() == 2) {
    Eigen::VectorXd nested(3);
    nested << dcc_opt(0), dcc_opt(1), 0.0;
    const double nested_ll = profiled_loglik(data, kind, nested);
    if (nested_ll > fit.loglik) {
      fit.params = nested;
      fit.loglik = nested_ll;
      fit.converged = true;
    }
  }

  // Boundary screen: a = 0 collapses the recursion to R_t = R_bar (the
  // constant-correlation profile, with b unidentified), and the
  // reparameterization cannot reach it exactly. Keep the free dynamics only
  // when they beat the pinned profile at the 10% likelihood-ratio level;
  // otherwise report the boundary optimum.
  {
    Eigen::VectorXd pinned = fit.params;
    pinned(0) = 0.0;
    const double pinned_ll = profiled_loglik(data, kind, pinned);
    if (2.0 * (fit.loglik - pinned_ll) < 2.706) {
      fit.params = pinned;
      fit.loglik = pinned_ll;
      fit.boundary = true;
    }
  }

  TargetResult target = target_r_bar(data, kind, fit.params);
  fit.r_bar = target.r_bar;
  fit.target_converged = target.converged;
  fit.path = filter_for(kind, data, fit.params, fit.r_bar, true);
  fit.loglik = corr_loglik(data, fit.path);

  // robust SEs in the original parameter space
  optim::Objective params_loglik = [&](const Eigen::VectorXd& p) {
    if (p(0) < 0.0 || p(1) < 0.0 || p(0) + p(1) >= 1.0) return kNegInf;
    if (kind == CorrKind::NLARC && p(2) < 0.0) return kNegInf;
    return profiled_loglik(data, kind, p);
  };
  PerObsLoglik per_obs = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    TargetResult tr = target_r_bar(data, kind, p);
    CorrelationPath path = filter_for(kind, data, p, tr.r_bar, false);
    return corr_loglik_per_obs(data, path);
  };
  std::vector<int> pinned_coords;
  if (fit.boundary) pinned_coords.push_back(0);
  try {
    Eigen::MatrixXd scores = per_obs_scores(per_obs, fit.params);
    fit.robust_se = robust_se(params_loglik, fit.params, scores, pinned_coords);
  } catch (const NumericError&) {
    fit.robust_se = Eigen::VectorXd::Constant(fit.n_params, kNaN);
    if (fit.boundary) fit.robust_se(0) = 0.0;
  }
  return fit;
}

}  // namespace corrkit
