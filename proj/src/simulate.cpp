#include "corrkit/simulate.hpp"

#include <cmath>
#include <limits>

#include "corrkit/errors.hpp"
#include "corrkit/inference.hpp"
#include "corrkit/stats.hpp"

namespace corrkit {

double Rng::uniform() {
  // 53-bit mantissa, shifted into the open interval (0, 1)
  return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
}

double Rng::normal() { return stats::normal_quantile(uniform()); }

Eigen::VectorXd simulate_garch(const SimSpec& spec) {
  if (!spec.garch.valid()) throw InputError("simulate_garch: invalid parameters");
  if (spec.burn_in < 100) throw InputError("simulate_garch: burn_in must be >= 100");
  Rng rng(spec.seed);
  const int total = spec.burn_in + spec.length;
  const double persistence = spec.garch.alpha + spec.garch.beta;
  double h2 = spec.garch.omega / (1.0 - persistence);
  Eigen::VectorXd out(spec.length);
  double y_prev = 0.0;
  for (int t = 0; t < total; ++t) {
    if (t > 0)
      h2 = spec.garch.omega + spec.garch.alpha * y_prev * y_prev +
           spec.garch.beta * h2;
    const double y = std::sqrt(h2) * rng.normal();
    if (t >= spec.burn_in) out(t - spec.burn_in) = y;
    y_prev = y;
  }
  return out;
}

CorrPanelSim simulate_corr_panel(const SimSpec& spec) {
  const int n = spec.n;
  if (spec.r_bar.rows() != n || spec.r_bar.cols() != n)
    throw InputError("simulate_corr_panel: R_bar dimension mismatch");
  if (spec.burn_in < 100)
    throw InputError("simulate_corr_panel: burn_in must be >= 100");
  const bool dynamic = spec.kind == SimKind::Dcc || spec.kind == SimKind::Nlarc;
  if (dynamic && !spec.corr.valid())
    throw InputError("simulate_corr_panel: invalid correlation parameters");
  const bool use_gate = spec.kind == SimKind::Nlarc;
  const double a = dynamic ? spec.corr.a : 0.0;
  const double b = dynamic ? spec.corr.b : 0.0;
  const double phi_a = use_gate ? spec.corr.phi_a : 0.0;

  Eigen::LLT<Eigen::MatrixXd> r_bar_llt(spec.r_bar);
  if (r_bar_llt.info() != Eigen::Success)
    throw InputError("simulate_corr_panel: R_bar not positive definite");

  Rng rng(spec.seed);
  const int total = spec.burn_in + spec.length;
  CorrPanelSim sim;
  Eigen::MatrixXd eps_full(total, n);
  sim.r_path.reserve(spec.length);

  Eigen::MatrixXd q = spec.r_bar;   // Q_1 = R_bar
  Eigen::MatrixXd r_prev = spec.r_bar;
  Eigen::VectorXd z(n);
  for (int t = 0; t < total; ++t) {
    if (t > 0) {
      Eigen::VectorXd qd = q.diagonal().cwiseSqrt();
      Eigen::VectorXd scaled = qd.cwiseProduct(eps_full.row(t - 1).transpose());
      Eigen::MatrixXd outer = scaled * scaled.transpose();
      if (use_gate)
        outer = hadamard_gate(r_prev, phi_a).cwiseProduct(outer).eval();
      q = ((1.0 - a - b) * spec.r_bar + a * outer + b * q).eval();
    }
    Eigen::VectorXd d = q.diagonal().cwiseSqrt();
    Eigen::MatrixXd r =
        d.cwiseInverse().asDiagonal() * q * d.cwiseInverse().asDiagonal();
    r = (0.5 * (r + r.transpose())).eval();
    r.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(r);
    if (llt.info() != Eigen::Success)
      throw NumericError("simulate_corr_panel: R_t lost positive definiteness");
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    eps_full.row(t) = (Eigen::MatrixXd(llt.matrixL()) * z).transpose();
    if (t >= spec.burn_in) sim.r_path.push_back(r);
    r_prev = r;
  }

  sim.eps_full = eps_full;
  sim.eps = eps_full.bottomRows(spec.length);
  sim.y = sim.eps;
  if (spec.garch_layer) {
    if (!spec.garch.valid())
      throw InputError("simulate_corr_panel: invalid GARCH layer parameters");
    const double uncond =
        spec.garch.omega / (1.0 - spec.garch.alpha - spec.garch.beta);
    for (int c = 0; c < n; ++c) {
      double h2 = uncond;
      for (int t = 0; t < spec.length; ++t) {
        if (t > 0) {
          const double y_prev = sim.y(t - 1, c);
          h2 = spec.garch.omega + spec.garch.alpha * y_prev * y_prev +
               spec.garch.beta * h2;
        }
        sim.y(t, c) = std::sqrt(h2) * sim.eps(t, c);
      }
    }
  }
  return sim;
}

namespace {

struct RepResult {
  bool ok = false;
  Eigen::VectorXd corr_est, corr_se;       // (a, b[, phi])
  std::vector<double> alpha_est, alpha_se; // per column, when garch_layer
  std::vector<double> beta_est, beta_se;
  bool lr_reject = false;
};

RepResult run_replication(const SimSpec& spec, std::uint64_t seed) {
  SimSpec rep_spec = spec;
  rep_spec.seed = seed;
  RepResult rep;
  try {
    CorrPanelSim sim = simulate_corr_panel(rep_spec);
    DegarchPanel panel;
    panel.names.resize(spec.n);
    panel.used_garch.assign(spec.n, spec.garch_layer);
    panel.residuals.resize(spec.length, spec.n);
    for (int c = 0; c < spec.n; ++c) {
      Eigen::VectorXd col = sim.y.col(c);
      Eigen::VectorXd centered = col.array() - col.mean();
      if (spec.garch_layer) {
        GarchFit fit = fit_garch(centered);
        if (!fit.converged) return rep;
        panel.residuals.col(c) = degarch(centered, fit);
        rep.alpha_est.push_back(fit.params.alpha);
        rep.alpha_se.push_back(fit.std_errors(1));
        rep.beta_est.push_back(fit.params.beta);
        rep.beta_se.push_back(fit.std_errors(2));
      } else {
        panel.residuals.col(c) = centered / stats::sample_sd(
            std::vector<double>(col.data(), col.data() + col.size()));
      }
    }
    const CorrKind kind =
        spec.kind == SimKind::Nlarc ? CorrKind::NLARC : CorrKind::DCC;
    CorrFit corr = fit_corr(panel, kind);
    CorrFit ccc = ccc_estimate(panel);
    rep.corr_est = corr.params;
    rep.corr_se = corr.robust_se;
    rep.lr_reject = lr_test(ccc.loglik, corr.loglik, 2).reject;
    rep.ok = true;
  } catch (const std::exception&) {
    rep.ok = false;
  }
  return rep;
}

RecoveryRow summarize(const std::string& name, double truth,
                      const std::vector<double>& est,
                      const std::vector<double>& se) {
  RecoveryRow row;
  row.name = name;
  row.truth = truth;
  const int n = static_cast<int>(est.size());
  if (n == 0) return row;
  double sum = 0.0, sq = 0.0;
  int in2 = 0, in3 = 0, with_se = 0;
  for (int i = 0; i < n; ++i) {
    sum += est[i];
    sq += (est[i] - truth) * (est[i] - truth);
    if (std::isfinite(se[i])) {
      ++with_se;
      if (std::fabs(est[i] - truth) <= 2.0 * se[i]) ++in2;
      if (std::fabs(est[i] - truth) <= 3.0 * se[i]) ++in3;
    }
  }
  row.mean_estimate = sum / n;
  row.bias = row.mean_estimate - truth;
  row.rmse = std::sqrt(sq / n);
  row.coverage2se = with_se ? static_cast<double>(in2) / with_se : 0.0;
  row.coverage3se = with_se ? static_cast<double>(in3) / with_se : 0.0;
  return row;
}

}  // namespace

RecoveryReport recovery_experiment(const SimSpec& spec, int replications) {
  if (replications < 1)
    throw InputError("recovery_experiment: replications must be >= 1");
  std::vector<RepResult> reps(replications);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < replications; ++r)
    reps[r] = run_replication(spec, spec.seed + static_cast<std::uint64_t>(r));

  RecoveryReport report;
  report.replications = replications;
  std::vector<double> a_est, a_se, b_est, b_se, phi_est, phi_se;
  std::vector<double> alpha_est, alpha_se, beta_est, beta_se;
  int lr_rejects = 0, ok_count = 0;
  for (const auto& rep : reps) {
    if (!rep.ok) {
      ++report.failures;
      continue;
    }
    ++ok_count;
    a_est.push_back(rep.corr_est(0));
    a_se.push_back(rep.corr_se(0));
    b_est.push_back(rep.corr_est(1));
    b_se.push_back(rep.corr_se(1));
    if (rep.corr_est.size() > 2) {
      phi_est.push_back(rep.corr_est(2));
      phi_se.push_back(rep.corr_se(2));
    }
    alpha_est.insert(alpha_est.end(), rep.alpha_est.begin(), rep.alpha_est.end());
    alpha_se.insert(alpha_se.end(), rep.alpha_se.begin(), rep.alpha_se.end());
    beta_est.insert(beta_est.end(), rep.beta_est.begin(), rep.beta_est.end());
    beta_se.insert(beta_se.end(), rep.beta_se.begin(), rep.beta_se.end());
    if (rep.lr_reject) ++lr_rejects;
  }
  report.lr_dcc_vs_ccc_reject_rate =
      ok_count ? static_cast<double>(lr_rejects) / ok_count : 0.0;
  report.rows.push_back(summarize("a", spec.corr.a, a_est, a_se));
  report.rows.push_back(summarize("b", spec.corr.b, b_est, b_se));
  if (!phi_est.empty())
    report.rows.push_back(summarize("phi_A", spec.corr.phi_a, phi_est, phi_se));
  if (!alpha_est.empty()) {
    report.rows.push_back(
        summarize("alpha", spec.garch.alpha, alpha_est, alpha_se));
    report.rows.push_back(summarize("beta", spec.garch.beta, beta_est, beta_se));
  }
  return report;
}

}  // namespace corrkit
