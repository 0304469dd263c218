#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corrkit/correlation.hpp"
#include "corrkit/diagnostics.hpp"
#include "corrkit/errors.hpp"
#include "corrkit/garch.hpp"
#include "corrkit/inference.hpp"
#include "corrkit/pipeline.hpp"
#include "corrkit/simulate.hpp"
#include "corrkit/stats.hpp"

namespace {

using namespace corrkit;

CorrKind kind_from(const std::string& text) {
  if (text == "ccc") return CorrKind::CCC;
  if (text == "dcc") return CorrKind::DCC;
  if (text == "nlarc") return CorrKind::NLARC;
  throw InputError("unknown model '" + text + "' (expected ccc/dcc/nlarc)");
}

DegarchPanel panel_as_degarched(const AlignedPanel& panel) {
  DegarchPanel out;
  out.dates = panel.dates;
  out.names = panel.names;
  out.residuals = panel.values;
  out.used_garch.assign(panel.names.size(), false);
  return out;
}

void print_record(const std::string& name, double statistic, double p_value,
                  const std::string& decision) {
  std::printf("%s statistic=%.6f p_value=%.6f decision=%s\n", name.c_str(),
              statistic, p_value, decision.c_str());
}

int cmd_run(const std::string& config_path) {
  PipelineConfig config = load_config(config_path);
  try {
    PipelineResult result = run_pipeline(config);
    write_artifacts(config, result);
    std::cout << render_table1(result.diagnostics) << "\n"
              << render_table2(result.models, result.lr_dcc_vs_ccc,
                               result.lr_nlarc_vs_dcc);
    std::cout << "artifacts written to " << config.output_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    // retain a failure record so partial runs are auditable
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(config.output_dir) / "failed");
    std::ofstream(fs::path(config.output_dir) / "failed" / "error.txt")
        << e.what() << "\n";
    throw;
  }
}

int cmd_diagnose(const std::string& panel_path, int arch_lags, int p_max,
                 int q_max, const std::string& table1_out) {
  AlignedPanel panel = read_panel_csv(panel_path);
  std::vector<SeriesDiagnostics> diags;
  for (Eigen::Index c = 0; c < panel.cols(); ++c) {
    SeriesDiagnostics diag;
    diag.name = panel.names[c];
    diag.adf = adf_test(panel.values.col(c));
    diag.arma_order = select_arma_order(panel.values.col(c), p_max, q_max);
    ArmaFit arma = fit_arma(panel.values.col(c), diag.arma_order);
    ArchLmResult arch = arch_lm_test(arma.residuals, arch_lags);
    diag.arch_lm_p = arch.p_value;
    diag.garch_flag = arch.heteroskedastic_at_5pct;
    print_record(diag.name + " adf", diag.adf.statistic,
                 std::numeric_limits<double>::quiet_NaN(),
                 diag.adf.reject_unit_root_at_5pct ? "stationary" : "unit_root");
    print_record(diag.name + " arch_lm", arch.statistic, arch.p_value,
                 arch.heteroskedastic_at_5pct ? "heteroskedastic" : "homoskedastic");
    std::printf("%s arma p=%d q=%d\n", diag.name.c_str(), diag.arma_order.p,
                diag.arma_order.q);
    diags.push_back(diag);
  }
  if (!table1_out.empty()) write_table1_csv(table1_out, diags);
  std::cout << render_table1(diags);
  return 0;
}

int cmd_fit_garch(const std::string& panel_path, int arch_lags,
                  const std::string& out_path) {
  AlignedPanel panel = read_panel_csv(panel_path);
  const Eigen::Index n = panel.cols();
  std::vector<ArmaSpec> orders(n);
  std::vector<bool> flags(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    orders[c] = select_arma_order(panel.values.col(c));
    ArmaFit arma = fit_arma(panel.values.col(c), orders[c]);
    flags[c] = arch_lm_test(arma.residuals, arch_lags).heteroskedastic_at_5pct;
  }
  DegarchPanel degarched = first_step(panel, orders, flags);
  std::printf("%-16s %-10s %12s %12s %12s\n", "series", "scale", "omega",
              "alpha", "beta");
  for (Eigen::Index c = 0; c < n; ++c) {
    if (degarched.used_garch[c]) {
      ArmaFit arma = fit_arma(panel.values.col(c), orders[c]);
      GarchFit fit = fit_garch(arma.residuals);
      std::printf("%-16s %-10s %8.4f (%.4f) %8.4f (%.4f) %8.4f (%.4f)\n",
                  panel.names[c].c_str(), "garch", fit.params.omega,
                  fit.std_errors(0), fit.params.alpha, fit.std_errors(1),
                  fit.params.beta, fit.std_errors(2));
    } else {
      std::printf("%-16s %-10s\n", panel.names[c].c_str(), "unconditional");
    }
  }
  if (!out_path.empty()) {
    AlignedPanel view;
    view.dates = degarched.dates;
    view.names = degarched.names;
    view.transforms.assign(degarched.names.size(), {});
    view.values = degarched.residuals;
    write_panel_csv(out_path, view);
  }
  return 0;
}

int cmd_fit_corr(const std::string& panel_path, const std::string& model,
                 const std::string& params_out, const std::string& path_out) {
  AlignedPanel panel = read_panel_csv(panel_path);
  DegarchPanel degarched = panel_as_degarched(panel);
  CorrFit fit = fit_corr(degarched, kind_from(model));
  const char* names[3] = {"a", "b", "phi_A"};
  for (Eigen::Index i = 0; i < fit.params.size(); ++i)
    std::printf("%s = %.3f (%.3f)%s\n", names[i], fit.params(i),
                fit.robust_se(i),
                (i == 0 && fit.boundary) ? " [boundary]" : "");
  std::printf("loglik = %.3f  n_params = %d  min_eig = %.3e\n", fit.loglik,
              fit.n_params, fit.path.min_eigenvalue);
  if (!params_out.empty()) {
    std::ofstream out(params_out);
    out << "param,estimate,robust_se\n";
    for (Eigen::Index i = 0; i < fit.params.size(); ++i)
      out << names[i] << "," << fit.params(i) << "," << fit.robust_se(i) << "\n";
    out << "loglik," << fit.loglik << ",\n";
  }
  if (!path_out.empty())
    write_correlation_path_csv(path_out, degarched.dates, degarched.names,
                               fit.path);
  return 0;
}

int cmd_rolling(const std::string& panel_path, int window,
                const std::string& out_path) {
  AlignedPanel panel = read_panel_csv(panel_path);
  DegarchPanel degarched = panel_as_degarched(panel);
  RollingPath rolling = rolling_correlation(degarched, window);
  if (!out_path.empty()) write_rolling_csv(out_path, panel.names, rolling);
  std::printf("rolling window=%d pairs=%zu windows=%ld\n", window,
              rolling.pairs.size(), static_cast<long>(rolling.values.rows()));
  return 0;
}

SimSpec build_sim_spec(const std::string& kind, int n, int t, int burn_in,
                       double a, double b, double phi, double rho,
                       bool garch_layer, double omega, double alpha,
                       double beta, std::uint64_t seed) {
  SimSpec spec;
  if (kind == "garch") spec.kind = SimKind::GarchUnivariate;
  else if (kind == "ccc") spec.kind = SimKind::Ccc;
  else if (kind == "dcc") spec.kind = SimKind::Dcc;
  else if (kind == "nlarc") spec.kind = SimKind::Nlarc;
  else throw InputError("unknown simulation kind '" + kind + "'");
  spec.n = n;
  spec.length = t;
  spec.burn_in = burn_in;
  spec.corr = {a, b, phi};
  spec.garch = {omega, alpha, beta};
  spec.garch_layer = garch_layer;
  spec.seed = seed;
  spec.r_bar = Eigen::MatrixXd::Constant(n, n, rho);
  spec.r_bar.diagonal().setOnes();
  return spec;
}

int cmd_simulate(const SimSpec& spec, const std::string& out_path) {
  AlignedPanel panel;
  if (spec.kind == SimKind::GarchUnivariate) {
    panel.names = {"y"};
    panel.values = simulate_garch(spec);
    panel.transforms.assign(1, {});
  } else {
    CorrPanelSim sim = simulate_corr_panel(spec);
    for (int c = 0; c < spec.n; ++c)
      panel.names.push_back("s" + std::to_string(c + 1));
    panel.values = sim.y;
    panel.transforms.assign(spec.n, {});
  }
  // synthetic strictly-increasing calendar dates
  int y = 2000, m = 1, d = 1;
  for (Eigen::Index t = 0; t < panel.values.rows(); ++t) {
    panel.dates.push_back(Date{y, m, d});
    if (++d > 28) { d = 1; if (++m > 12) { m = 1; ++y; } }
  }
  write_panel_csv(out_path, panel);
  std::printf("wrote %ld x %ld panel to %s\n",
              static_cast<long>(panel.values.rows()),
              static_cast<long>(panel.values.cols()), out_path.c_str());
  return 0;
}

int cmd_recover(const SimSpec& spec, int replications,
                const std::string& out_path) {
  RecoveryReport report = recovery_experiment(spec, replications);
  std::printf("%-8s %8s %10s %10s %10s %8s %8s\n", "param", "truth", "mean",
              "bias", "rmse", "cov2se", "cov3se");
  for (const auto& row : report.rows)
    std::printf("%-8s %8.4f %10.4f %10.4f %10.4f %8.3f %8.3f\n",
                row.name.c_str(), row.truth, row.mean_estimate, row.bias,
                row.rmse, row.coverage2se, row.coverage3se);
  std::printf("replications=%d failures=%d lr_dcc_vs_ccc_reject_rate=%.3f\n",
              report.replications, report.failures,
              report.lr_dcc_vs_ccc_reject_rate);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << "param,truth,mean,bias,rmse,coverage2se,coverage3se\n";
    for (const auto& row : report.rows)
      out << row.name << "," << row.truth << "," << row.mean_estimate << ","
          << row.bias << "," << row.rmse << "," << row.coverage2se << ","
          << row.coverage3se << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional-correlation estimation toolkit"};
  app.require_subcommand(1);

  // run
  std::string config_path;
  auto* run = app.add_subcommand("run", "full pipeline from a config file");
  run->add_option("--config", config_path, "config file")->required();

  // ingest
  std::string ingest_out = "panel.csv";
  auto* ingest = app.add_subcommand("ingest", "load, window and align series");
  ingest->add_option("--config", config_path, "config file")->required();
  ingest->add_option("--out", ingest_out, "output panel CSV");

  // diagnose
  std::string panel_path, table1_out;
  int arch_lags = kDefaultArchLmLags, p_max = 3, q_max = 3;
  auto* diagnose = app.add_subcommand("diagnose", "ADF, ARMA order, ARCH-LM per column");
  diagnose->add_option("--panel", panel_path, "panel CSV")->required();
  diagnose->add_option("--arch-lags", arch_lags);
  diagnose->add_option("--p-max", p_max);
  diagnose->add_option("--q-max", q_max);
  diagnose->add_option("--table1", table1_out, "write Table-1-style CSV");

  // fit-garch
  std::string degarch_out;
  auto* fit_garch_cmd = app.add_subcommand("fit-garch", "first step: GARCH/fallback per column");
  fit_garch_cmd->add_option("--panel", panel_path, "panel CSV")->required();
  fit_garch_cmd->add_option("--arch-lags", arch_lags);
  fit_garch_cmd->add_option("--out", degarch_out, "de-GARCHed panel CSV");

  // fit-corr
  std::string model = "dcc", params_out, path_out;
  auto* fit_corr_cmd = app.add_subcommand("fit-corr", "second step: correlation model");
  fit_corr_cmd->add_option("--panel", panel_path, "de-GARCHed panel CSV")->required();
  fit_corr_cmd->add_option("--model", model, "ccc|dcc|nlarc")->required();
  fit_corr_cmd->add_option("--out-params", params_out);
  fit_corr_cmd->add_option("--out-path", path_out, "correlation path CSV");

  // test lr
  double l_restricted = 0.0, l_unrestricted = 0.0;
  int dof = 1;
  auto* test_cmd = app.add_subcommand("test", "statistical tests");
  auto* lr_cmd = test_cmd->add_subcommand("lr", "likelihood-ratio test");
  lr_cmd->add_option("--restricted", l_restricted, "restricted loglik")->required();
  lr_cmd->add_option("--unrestricted", l_unrestricted, "unrestricted loglik")->required();
  lr_cmd->add_option("--dof", dof, "degrees of freedom")->required();

  // report aic
  double loglik_in = 0.0;
  int k_params = 0, t_obs = 0;
  auto* report_cmd = app.add_subcommand("report", "report helpers");
  auto* aic_cmd = report_cmd->add_subcommand("aic", "per-observation AIC");
  aic_cmd->add_option("--loglik", loglik_in)->required();
  aic_cmd->add_option("--params", k_params)->required();
  aic_cmd->add_option("--t-obs", t_obs)->required();

  // rolling
  int window = 5;
  std::string rolling_out;
  auto* rolling_cmd = app.add_subcommand("rolling", "rolling correlations");
  rolling_cmd->add_option("--panel", panel_path, "panel CSV")->required();
  rolling_cmd->add_option("--window", window);
  rolling_cmd->add_option("--out", rolling_out);

  // simulate / recover
  std::string sim_kind = "dcc", sim_out = "sim_panel.csv", recover_out;
  int sim_n = 2, sim_t = 1000, burn_in = 500, replications = 100;
  double sim_a = 0.05, sim_b = 0.90, sim_phi = 0.0, sim_rho = 0.5;
  double sim_omega = 0.1, sim_alpha = 0.05, sim_beta = 0.90;
  bool garch_layer = false;
  std::uint64_t seed = 1;
  auto add_sim_options = [&](CLI::App* cmd) {
    cmd->add_option("--kind", sim_kind, "garch|ccc|dcc|nlarc");
    cmd->add_option("--n", sim_n);
    cmd->add_option("--t", sim_t);
    cmd->add_option("--burn-in", burn_in);
    cmd->add_option("--a", sim_a);
    cmd->add_option("--b", sim_b);
    cmd->add_option("--phi", sim_phi);
    cmd->add_option("--rho", sim_rho, "off-diagonal of R_bar");
    cmd->add_flag("--garch-layer", garch_layer);
    cmd->add_option("--omega", sim_omega);
    cmd->add_option("--alpha", sim_alpha);
    cmd->add_option("--beta", sim_beta);
    cmd->add_option("--seed", seed);
  };
  auto* simulate_cmd = app.add_subcommand("simulate", "draw a panel from a model DGP");
  add_sim_options(simulate_cmd);
  simulate_cmd->add_option("--out", sim_out);
  auto* recover_cmd = app.add_subcommand("recover", "Monte Carlo parameter recovery");
  add_sim_options(recover_cmd);
  recover_cmd->add_option("--replications", replications);
  recover_cmd->add_option("--out", recover_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (ingest->parsed()) {
      PipelineConfig config = load_config(config_path);
      std::vector<RawSeries> raw;
      for (const auto& source : config.sources) {
        RawSeries series =
            (source.location.rfind("http", 0) == 0)
                ? fetch_remote_series(source.location, config.cache_dir,
                                      source.date_column, source.value_column)
                : load_series_csv(source.location, source.date_column,
                                  source.value_column);
        series.name = source.name;
        raw.push_back(series);
      }
      AlignedPanel panel = window_panel(align_panel(raw), config.window_start,
                                        config.window_end);
      write_panel_csv(ingest_out, panel);
      std::printf("aligned panel: T=%ld N=%ld -> %s\n",
                  static_cast<long>(panel.rows()),
                  static_cast<long>(panel.cols()), ingest_out.c_str());
      return 0;
    }
    if (diagnose->parsed())
      return cmd_diagnose(panel_path, arch_lags, p_max, q_max, table1_out);
    if (fit_garch_cmd->parsed())
      return cmd_fit_garch(panel_path, arch_lags, degarch_out);
    if (fit_corr_cmd->parsed())
      return cmd_fit_corr(panel_path, model, params_out, path_out);
    if (lr_cmd->parsed()) {
      LrResult lr = corrkit::lr_test(l_restricted, l_unrestricted, dof);
      print_record("lr", lr.statistic,
                   corrkit::stats::chi2_sf(lr.statistic, lr.dof),
                   lr.reject ? "reject" : "fail_to_reject");
      return 0;
    }
    if (aic_cmd->parsed()) {
      std::printf("aic = %.3f\n", corrkit::aic(loglik_in, k_params, t_obs));
      return 0;
    }
    if (rolling_cmd->parsed()) return cmd_rolling(panel_path, window, rolling_out);
    if (simulate_cmd->parsed() || recover_cmd->parsed()) {
      SimSpec spec = build_sim_spec(sim_kind, sim_n, sim_t, burn_in, sim_a,
                                    sim_b, sim_phi, sim_rho, garch_layer,
                                    sim_omega, sim_alpha, sim_beta, seed);
      if (simulate_cmd->parsed()) return cmd_simulate(spec, sim_out);
      return cmd_recover(spec, replications, recover_out);
    }
  } catch (const NetworkError& e) {
    std::cerr << "network error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
