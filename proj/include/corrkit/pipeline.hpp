#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corrkit/correlation.hpp"
#include "corrkit/diagnostics.hpp"
#include "corrkit/inference.hpp"
#include "corrkit/series.hpp"

namespace corrkit {

struct SeriesSource {
  std::string name;
  std::string location;  // file path or http(s) URL
  std::string date_column = "date";
  std::string value_column = "value";
  std::optional<bool> log_override;  // unset: log iff strictly positive
};

struct PipelineConfig {
  std::vector<SeriesSource> sources;
  Date window_start;
  Date window_end;
  int arma_p_max = 3;
  int arma_q_max = 3;
  int arch_lm_lags = kDefaultArchLmLags;
  std::vector<CorrKind> models{CorrKind::CCC, CorrKind::DCC, CorrKind::NLARC};
  int rolling_window = 5;
  std::string output_dir = "out";
  std::string cache_dir = "cache";
  std::uint64_t seed = 1;
};

// INI-style config: [series.<name>] blocks plus [window], [estimation],
// [output]. Unknown sections or keys are hard errors.
PipelineConfig load_config(const std::string& path);

struct SeriesDiagnostics {
  std::string name;
  AdfResult adf;          // on the (log-)level
  bool differenced = false;
  bool logged = false;
  ArmaSpec arma_order;
  double arch_lm_p = 0.0;
  bool garch_flag = false;
};

struct ModelSummary {
  CorrKind kind;
  Eigen::VectorXd params;
  Eigen::VectorXd robust_se;
  double loglik = 0.0;
  double aic = 0.0;
  bool boundary = false;
  CorrelationPath path;
};

struct PipelineResult {
  AlignedPanel panel;  // transformed, estimation-ready
  std::vector<SeriesDiagnostics> diagnostics;
  DegarchPanel degarched;
  std::vector<ModelSummary> models;
  std::optional<LrResult> lr_dcc_vs_ccc;
  std::optional<LrResult> lr_nlarc_vs_dcc;
  RollingPath rolling;
  std::string manifest_json;
};

PipelineResult run_pipeline(const PipelineConfig& config);

// Writes panel/degarched/table/path CSVs, text renderings, and the manifest
// under config.output_dir.
void write_artifacts(const PipelineConfig& config, const PipelineResult& result);

// Table-1-style view: series, DGP label (delta prefix when differenced),
// ARCH-LM p-value to 3 decimals.
std::string render_table1(const std::vector<SeriesDiagnostics>& diagnostics);
void write_table1_csv(const std::string& path,
                      const std::vector<SeriesDiagnostics>& diagnostics);

// Table-2-style view: parameter rows with parenthesized SEs, loglik, AIC,
// and the LR diagnostic panel.
std::string render_table2(const std::vector<ModelSummary>& models,
                          const std::optional<LrResult>& lr_dcc_vs_ccc,
                          const std::optional<LrResult>& lr_nlarc_vs_dcc);
void write_table2_csv(const std::string& path,
                      const std::vector<ModelSummary>& models,
                      const std::optional<LrResult>& lr_dcc_vs_ccc,
                      const std::optional<LrResult>& lr_nlarc_vs_dcc);

// Shared "date, pair, rho" long format used by both the fitted correlation
// paths and the rolling baseline.
void write_correlation_path_csv(const std::string& path,
                                const std::vector<Date>& dates,
                                const std::vector<std::string>& names,
                                const CorrelationPath& corr_path);
void write_rolling_csv(const std::string& path,
                       const std::vector<std::string>& names,
                       const RollingPath& rolling);

}  // namespace corrkit
