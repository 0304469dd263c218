// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier Monte Carlo checks live here rather than in the unit tests.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "corrkit/correlation.hpp"
#include "corrkit/diagnostics.hpp"
#include "corrkit/inference.hpp"
#include "corrkit/pipeline.hpp"
#include "corrkit/ref.hpp"
#include "corrkit/simulate.hpp"
#include "corrkit/stats.hpp"

using namespace corrkit;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

// Global positive-definiteness tally (criterion 6) fed by every eigenvalue-
// certified path produced anywhere in this suite.
double g_min_eig = 1.0;
double g_max_diag_err = 0.0;
long g_paths_checked = 0;

void report(int idx, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] %2d. %s — %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void tally_path(const CorrelationPath& path) {
  if (path.eigenvalues_computed && !path.matrices.empty()) {
    g_min_eig = std::min(g_min_eig, path.min_eigenvalue);
    ++g_paths_checked;
  }
  for (const auto& r : path.matrices)
    for (int i = 0; i < r.rows(); ++i)
      g_max_diag_err = std::max(g_max_diag_err, std::fabs(r(i, i) - 1.0));
}

Eigen::MatrixXd random_corr(int n, Rng& rng) {
  Eigen::MatrixXd x(3 * n + 20, n);
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < n; ++j) x(i, j) = rng.normal();
  Eigen::MatrixXd cov = x.transpose() * x;
  Eigen::VectorXd d = cov.diagonal().cwiseSqrt();
  Eigen::MatrixXd r = cov.array() / (d * d.transpose()).array();
  r.diagonal().setOnes();
  return r;
}

Eigen::MatrixXd random_panel(int t_obs, int n, Rng& rng) {
  Eigen::MatrixXd eps(t_obs, n);
  for (int t = 0; t < t_obs; ++t)
    for (int j = 0; j < n; ++j) eps(t, j) = rng.normal();
  return eps;
}

DegarchPanel wrap_panel(const Eigen::MatrixXd& eps) {
  DegarchPanel p;
  p.residuals = eps;
  Date d{2000, 1, 1};
  for (int t = 0; t < eps.rows(); ++t) {
    p.dates.push_back(d);
    ++d.day;
    if (d.day > 28) { d.day = 1; ++d.month; }
    if (d.month > 12) { d.month = 1; ++d.year; }
  }
  for (int j = 0; j < eps.cols(); ++j) p.names.push_back("s" + std::to_string(j));
  p.used_garch.assign(eps.cols(), true);
  return p;
}

ref::Panel to_ref_panel(const Eigen::MatrixXd& m) {
  ref::Panel p(m.rows(), std::vector<double>(m.cols()));
  for (int t = 0; t < m.rows(); ++t)
    for (int j = 0; j < m.cols(); ++j) p[t][j] = m(t, j);
  return p;
}

ref::Matrix to_ref_matrix(const Eigen::MatrixXd& m) {
  ref::Matrix r(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- criteria -------------------------------------------------------------

void criterion_lr_arithmetic() {
  LrResult r1 = lr_test(-409.454, -406.795, 2);
  LrResult r2 = lr_test(-406.795, -406.725, 1);
  bool pass = std::fabs(r1.statistic - 5.320) <= 0.01 && r1.reject &&
              std::fabs(r1.critical_value_10pct - 4.605) <= 0.001 &&
              std::fabs(r2.statistic - 0.140) <= 0.001 && !r2.reject &&
              std::fabs(r2.critical_value_10pct - 2.706) <= 0.001;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "LR stats %.3f (reject) and %.3f (keep)",
                r1.statistic, r2.statistic);
  report(1, "likelihood-ratio arithmetic", pass, buf);
}

void criterion_aic_convention() {
  double a0 = aic(-411.807, 0, 166);
  double a2 = aic(-411.807, 2, 166);
  double a3 = aic(-411.807, 3, 166);
  bool pass = std::fabs(a0 - 4.962) <= 0.001 && std::fabs(a2 - 4.986) <= 0.001 &&
              std::fabs(a3 - 4.998) <= 0.001;
  // cross-check against a second reference row (looser: the reference
  // logliks are rounded to 3 decimals)
  pass = pass && std::fabs(aic(-409.454, 0, 166) - 4.935) <= 0.003 &&
         std::fabs(aic(-406.795, 2, 166) - 4.927) <= 0.003 &&
         std::fabs(aic(-406.725, 3, 166) - 4.938) <= 0.003;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "AIC(k=0/2/3) = %.3f / %.3f / %.3f", a0, a2, a3);
  report(2, "per-observation AIC convention", pass, buf);
}

void criterion_nesting() {
  Rng rng(101);
  double max_path_diff = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    int n = (inst % 2 == 0) ? 2 : 5;
    Eigen::MatrixXd r_bar = random_corr(n, rng);
    Eigen::MatrixXd eps = random_panel(300, n, rng);
    double a = 0.02 + 0.08 * rng.uniform();
    double b = 0.6 + 0.3 * rng.uniform();
    CorrelationPath dcc = dcc_filter(eps, {a, b}, r_bar, true);
    CorrelationPath nlarc = nlarc_filter(eps, {a, b, 0.0}, r_bar, true);
    tally_path(dcc);
    tally_path(nlarc);
    for (size_t t = 0; t < dcc.matrices.size(); ++t)
      max_path_diff = std::max(
          max_path_diff,
          (dcc.matrices[t] - nlarc.matrices[t]).cwiseAbs().maxCoeff());
  }
  // fitted-loglik ordering on a handful of panels (fits are the slow part)
  bool order_ok = true;
  double worst_gap = 0.0;
  for (int inst = 0; inst < 6; ++inst) {
    SimSpec spec;
    spec.kind = SimKind::Dcc;
    spec.n = (inst % 2 == 0) ? 2 : 5;
    spec.length = 300;
    spec.corr = {0.05, 0.90, 0.0};
    spec.r_bar = Eigen::MatrixXd::Constant(spec.n, spec.n, 0.4);
    spec.r_bar.diagonal().setOnes();
    spec.seed = 7000 + inst;
    DegarchPanel panel = wrap_panel(simulate_corr_panel(spec).eps);
    CorrFit dcc = fit_corr(panel, CorrKind::DCC);
    CorrFit nlarc = fit_corr(panel, CorrKind::NLARC);
    tally_path(dcc.path);
    tally_path(nlarc.path);
    worst_gap = std::min(worst_gap, nlarc.loglik - dcc.loglik);
    if (nlarc.loglik < dcc.loglik - 1e-6) order_ok = false;
  }
  bool pass = max_path_diff <= 1e-13 && order_ok;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max |R_t(phi=0) - R_t(DCC)| = %.2e; min loglik gap %.2e",
                max_path_diff, worst_gap);
  report(3, "NLARC nests DCC at phi_A = 0", pass, buf);
}

void criterion_oracles() {
  Rng rng(202);
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    int t_obs = 30 + static_cast<int>(rng.uniform() * 70);
    int n = 2 + static_cast<int>(rng.uniform() * 3);
    Eigen::MatrixXd r_bar = random_corr(n, rng);
    Eigen::MatrixXd eps = random_panel(t_obs, n, rng);
    double a = 0.02 + 0.1 * rng.uniform();
    double b = 0.5 + 0.35 * rng.uniform();
    double phi = 5.0 * rng.uniform();

    ref::Panel rp = to_ref_panel(eps);
    ref::Matrix rb = to_ref_matrix(r_bar);

    CorrelationPath dcc = dcc_filter(eps, {a, b}, r_bar, true);
    auto dcc_ref = ref::corr_filter(rp, a, b, -1.0, rb);
    CorrelationPath nlarc = nlarc_filter(eps, {a, b, phi}, r_bar, true);
    auto nlarc_ref = ref::corr_filter(rp, a, b, phi, rb);
    tally_path(dcc);
    tally_path(nlarc);
    for (int t = 0; t < t_obs; ++t)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          worst = std::max(worst,
                           std::fabs(dcc.matrices[t](i, j) - dcc_ref[t][i][j]));
          worst = std::max(
              worst, std::fabs(nlarc.matrices[t](i, j) - nlarc_ref[t][i][j]));
        }

    worst = std::max(worst, std::fabs(corr_loglik(eps, dcc) -
                                      ref::corr_loglik(rp, dcc_ref)));

    // univariate pieces on column 0
    Eigen::VectorXd y = eps.col(0);
    GarchParams gp{0.05 + 0.1 * rng.uniform(), 0.05 + 0.1 * rng.uniform(),
                   0.4 + 0.4 * rng.uniform()};
    Eigen::VectorXd h = garch_filter(y, gp);
    std::vector<double> h_ref = ref::garch_filter(
        {y.data(), y.data() + y.size()}, gp.omega, gp.alpha, gp.beta, 0.0);
    for (int t = 0; t < t_obs; ++t)
      worst = std::max(worst, std::fabs(h(t) - h_ref[t]));

    RollingPath roll = rolling_correlation(wrap_panel(eps), 5);
    for (size_t k = 0; k < roll.pairs.size(); ++k) {
      auto [i, j] = roll.pairs[k];
      std::vector<double> expect = ref::rolling_correlation(rp, i, j, 5);
      for (int w = 0; w < roll.values.rows(); ++w)
        worst = std::max(worst, std::fabs(roll.values(w, k) - expect[w]));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max |library - reference| = %.2e over 50 instances",
                worst);
  report(4, "serial-reference oracle equivalence", worst <= 1e-9, buf);
}

void criterion_recovery() {
  SimSpec spec;
  spec.kind = SimKind::Dcc;
  spec.n = 2;
  spec.length = 2000;
  spec.corr = {0.05, 0.90, 0.0};
  spec.garch_layer = true;
  spec.garch = {0.1, 0.05, 0.90};
  spec.r_bar = Eigen::MatrixXd::Identity(2, 2);
  spec.r_bar(0, 1) = spec.r_bar(1, 0) = 0.5;
  spec.seed = 90000;
  RecoveryReport rep = recovery_experiment(spec, 200);

  bool pass = rep.failures <= 10;
  std::string detail = "coverage3se:";
  for (const auto& row : rep.rows) {
    bool tracked = row.name == "a" || row.name == "b" || row.name == "alpha" ||
                   row.name == "beta";
    if (!tracked) continue;
    if (row.coverage3se < 0.95) pass = false;
    if ((row.name == "a" || row.name == "b") && std::fabs(row.bias) > 0.02)
      pass = false;
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %s=%.3f(bias %.4f)", row.name.c_str(),
                  row.coverage3se, row.bias);
    detail += buf;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "; failures %d/200", rep.failures);
  detail += buf;
  report(5, "Monte Carlo parameter recovery", pass, detail);
}

void criterion_positive_definiteness() {
  bool pass = g_paths_checked > 0 && g_min_eig > 1e-10 &&
              g_max_diag_err <= 1e-12;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "%ld certified paths; min eigenvalue %.2e; max |diag-1| %.2e",
                g_paths_checked, g_min_eig, g_max_diag_err);
  report(6, "positive-definite correlation paths", pass, buf);
}

void criterion_test_calibration() {
  int adf_rejects = 0;
  int lm_size_rejects = 0;
  int lm_power_rejects = 0;
  const int reps = 1000;
#pragma omp parallel for reduction(+ : adf_rejects, lm_size_rejects, \
                                       lm_power_rejects)
  for (int r = 0; r < reps; ++r) {
    {
      Rng rng(40000 + r);
      Eigen::VectorXd rw(250);
      double level = 0.0;
      for (int t = 0; t < 250; ++t) {
        level += rng.normal();
        rw(t) = level;
      }
      if (adf_test(rw).reject_unit_root_at_5pct) ++adf_rejects;
    }
    {
      Rng rng(50000 + r);
      Eigen::VectorXd iid(500);
      for (int t = 0; t < 500; ++t) iid(t) = rng.normal();
      if (arch_lm_test(iid, 5).heteroskedastic_at_5pct) ++lm_size_rejects;
    }
    {
      SimSpec spec;
      spec.kind = SimKind::GarchUnivariate;
      spec.length = 500;
      spec.garch = {0.1, 0.3, 0.6};  // strong ARCH for the power leg
      spec.seed = 60000 + r;
      if (arch_lm_test(simulate_garch(spec), 5).heteroskedastic_at_5pct)
        ++lm_power_rejects;
    }
  }
  double adf_size = adf_rejects / static_cast<double>(reps);
  double lm_size = lm_size_rejects / static_cast<double>(reps);
  double lm_power = lm_power_rejects / static_cast<double>(reps);
  bool pass = adf_size >= 0.03 && adf_size <= 0.07 && lm_size >= 0.03 &&
              lm_size <= 0.07 && lm_power >= 0.90;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "ADF size %.3f; ARCH-LM size %.3f; ARCH-LM power %.3f",
                adf_size, lm_size, lm_power);
  report(7, "diagnostic test calibration", pass, buf);
}

void criterion_ccc_degeneracy() {
  const int reps = 100;
  int ok = 0;
#pragma omp parallel for reduction(+ : ok)
  for (int r = 0; r < reps; ++r) {
    SimSpec spec;
    spec.kind = SimKind::Ccc;
    spec.n = 2;
    spec.length = 1000;
    spec.corr = {0.0, 0.0, 0.0};
    spec.r_bar = Eigen::MatrixXd::Identity(2, 2);
    spec.r_bar(0, 1) = spec.r_bar(1, 0) = 0.5;
    spec.seed = 70000 + r;
    DegarchPanel panel = wrap_panel(simulate_corr_panel(spec).eps);
    try {
      CorrFit dcc = fit_corr(panel, CorrKind::DCC);
      CorrFit ccc = ccc_estimate(panel);
      double a_hat = dcc.params(0);
      if (a_hat <= 0.01 && std::fabs(dcc.loglik - ccc.loglik) <= 0.5) ++ok;
    } catch (const std::exception&) {
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "a_hat <= 0.01 and |L_DCC - L_CCC| <= 0.5 in %d/%d runs", ok,
                reps);
  report(8, "constant-correlation degeneracy", ok >= 90, buf);
}

struct PipelineFixture {
  fs::path data_dir;
  PipelineConfig config;
};

PipelineFixture make_pipeline_fixture(const std::string& tag, int n_series,
                                      int t_obs) {
  PipelineFixture fx;
  fx.data_dir = fs::temp_directory_path() / ("corrkit_accept_" + tag);
  fs::remove_all(fx.data_dir);
  fs::create_directories(fx.data_dir);

  SimSpec spec;
  spec.kind = SimKind::Dcc;
  spec.n = n_series;
  spec.length = t_obs;
  spec.corr = {0.05, 0.90, 0.0};
  spec.garch_layer = true;
  spec.garch = {0.05, 0.08, 0.85};
  spec.r_bar = Eigen::MatrixXd::Constant(n_series, n_series, 0.4);
  spec.r_bar.diagonal().setOnes();
  spec.seed = 321;
  CorrPanelSim sim = simulate_corr_panel(spec);

  Date d{2018, 1, 2};
  std::vector<Date> dates;
  for (int t = 0; t <= t_obs; ++t) {
    dates.push_back(d);
    ++d.day;
    if (d.day > 28) { d.day = 1; ++d.month; }
    if (d.month > 12) { d.month = 1; ++d.year; }
  }
  for (int j = 0; j < n_series; ++j) {
    std::ofstream out(fx.data_dir / ("s" + std::to_string(j) + ".csv"));
    out << "date,value\n";
    double log_level = 2.0;
    out << dates[0].to_string() << "," << std::exp(log_level) << "\n";
    for (int t = 0; t < t_obs; ++t) {
      log_level += 0.01 * sim.y(t, j);
      out << dates[t + 1].to_string() << "," << std::exp(log_level) << "\n";
    }
    SeriesSource src;
    src.name = "s" + std::to_string(j);
    src.location = (fx.data_dir / (src.name + ".csv")).string();
    fx.config.sources.push_back(src);
  }
  fx.config.window_start = {2018, 1, 1};
  fx.config.window_end = {2030, 1, 1};
  fx.config.arma_p_max = 1;
  fx.config.arma_q_max = 1;
  fx.config.cache_dir = (fx.data_dir / "cache").string();
  return fx;
}

void criterion_determinism() {
  PipelineFixture fx = make_pipeline_fixture("determinism", 3, 180);
  fs::path out1 = fx.data_dir / "out1";
  fs::path out2 = fx.data_dir / "out2";
  fx.config.output_dir = out1.string();
  PipelineResult r1 = run_pipeline(fx.config);
  write_artifacts(fx.config, r1);
  fx.config.output_dir = out2.string();
  PipelineResult r2 = run_pipeline(fx.config);
  write_artifacts(fx.config, r2);
  for (const auto& m : r1.models) tally_path(m.path);

  std::vector<std::string> artifacts = {
      "manifest.json", "table1.csv",        "table2.csv",
      "table1.txt",    "table2.txt",        "panel.csv",
      "degarched.csv", "rolling.csv",       "corr_path_ccc.csv",
      "corr_path_dcc.csv", "corr_path_nlarc.csv"};
  int identical = 0;
  std::string first_diff;
  for (const auto& name : artifacts) {
    std::string b1 = read_file(out1 / name);
    std::string b2 = read_file(out2 / name);
    if (!b1.empty() && b1 == b2)
      ++identical;
    else if (first_diff.empty())
      first_diff = name;
  }
  bool pass = identical == static_cast<int>(artifacts.size());
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%d/%zu artifacts bit-identical%s%s",
                identical, artifacts.size(),
                first_diff.empty() ? "" : "; first mismatch: ",
                first_diff.c_str());
  report(9, "run-to-run determinism", pass, buf);
}

void criterion_scale() {
  PipelineFixture fx = make_pipeline_fixture("scale", 5, 170);
  fx.config.output_dir = (fx.data_dir / "out").string();
  auto start = std::chrono::steady_clock::now();
  PipelineResult result = run_pipeline(fx.config);
  write_artifacts(fx.config, result);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
  for (const auto& m : result.models) tally_path(m.path);
  bool pass = secs < 30.0 && result.models.size() == 3;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "5 series, T = %ld, %.1f s",
                static_cast<long>(result.panel.rows()), secs);
  report(10, "end-to-end runtime at working scale", pass, buf);
}

}  // namespace

int main() {
  criterion_lr_arithmetic();
  criterion_aic_convention();
  criterion_nesting();
  criterion_oracles();
  criterion_recovery();
  criterion_test_calibration();
  criterion_ccc_degeneracy();
  criterion_determinism();
  criterion_scale();
  criterion_positive_definiteness();  // aggregates paths from the runs above
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria failed\n", g_failures);
  return 1;
}
