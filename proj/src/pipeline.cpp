#include "corrkit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "corrkit/csv.hpp"
#include "corrkit/errors.hpp"
#include "corrkit/garch.hpp"
#include "corrkit/stats.hpp"
#include "json.hpp"

namespace corrkit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt3(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

CorrKind parse_kind(const std::string& text) {
  if (text == "ccc") return CorrKind::CCC;
  if (text == "dcc") return CorrKind::DCC;
  if (text == "nlarc") return CorrKind::NLARC;
  throw InputError("config: unknown model '" + text + "'");
}

struct IniSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;
};

std::vector<IniSection> parse_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open " + path);
  std::vector<IniSection> sections;
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return (a == std::string::npos) ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw InputError("config: malformed section at line " +
                         std::to_string(line_no));
      sections.push_back({t.substr(1, t.size() - 2), {}});
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos || sections.empty())
      throw InputError("config: malformed line " + std::to_string(line_no));
    sections.back().entries.emplace_back(trim(t.substr(0, eq)),
                                         trim(t.substr(eq + 1)));
  }
  return sections;
}

Date parse_date_or_throw(const std::string& text, const std::string& key) {
  auto date = Date::parse(text);
  if (!date) throw InputError("config: bad date for " + key + ": " + text);
  return *date;
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
  try {
    return std::stoull(text);
  } catch (...) {
    throw InputError("config: bad integer for " + key + ": " + text);
  }
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
  PipelineConfig config;
  bool have_window = false, have_models = false;
  for (const auto& section : parse_ini(path)) {
    if (section.name.rfind("series.", 0) == 0) {
      SeriesSource source;
      source.name = section.name.substr(7);
      if (source.name.empty()) throw InputError("config: empty series name");
      bool have_location = false;
      for (const auto& [key, value] : section.entries) {
        if (key == "location" || key == "path" || key == "url") {
          source.location = value;
          have_location = true;
        } else if (key == "date_column") {
          source.date_column = value;
        } else if (key == "value_column") {
          source.value_column = value;
        } else if (key == "log") {
          if (value == "auto") source.log_override.reset();
          else if (value == "true") source.log_override = true;
          else if (value == "false") source.log_override = false;
          else throw InputError("config: log must be auto/true/false");
        } else {
          throw InputError("config: unknown key '" + key + "' in [" +
                           section.name + "]");
        }
      }
      if (!have_location)
        throw InputError("config: series '" + source.name + "' has no location");
      config.sources.push_back(std::move(source));
    } else if (section.name == "window") {
      for (const auto& [key, value] : section.entries) {
        if (key == "start") config.window_start = parse_date_or_throw(value, key);
        else if (key == "end") config.window_end = parse_date_or_throw(value, key);
        else throw InputError("config: unknown key '" + key + "' in [window]");
      }
      have_window = true;
    } else if (section.name == "estimation") {
      for (const auto& [key, value] : section.entries) {
        if (key == "arma_p_max") config.arma_p_max = static_cast<int>(parse_u64(value, key));
        else if (key == "arma_q_max") config.arma_q_max = static_cast<int>(parse_u64(value, key));
        else if (key == "arch_lm_lags") config.arch_lm_lags = static_cast<int>(parse_u64(value, key));
        else if (key == "rolling_window") config.rolling_window = static_cast<int>(parse_u64(value, key));
        else if (key == "seed") config.seed = parse_u64(value, key);
        else if (key == "models") {
          config.models.clear();
          std::stringstream ss(value);
          std::string item;
          while (std::getline(ss, item, ',')) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            config.models.push_back(parse_kind(item));
          }
          have_models = true;
        } else {
          throw InputError("config: unknown key '" + key + "' in [estimation]");
        }
      }
    } else if (section.name == "output") {
      for (const auto& [key, value] : section.entries) {
        if (key == "dir") config.output_dir = value;
        else if (key == "cache_dir") config.cache_dir = value;
        else throw InputError("config: unknown key '" + key + "' in [output]");
      }
    } else {
      throw InputError("config: unknown section [" + section.name + "]");
    }
  }
  if (config.sources.size() < 2)
    throw InputError("config: at least two series required");
  if (!have_window || !(config.window_start < config.window_end))
    throw InputError("config: [window] with start < end required");
  if (config.models.empty())
    throw InputError("config: at least one model required");
  (void)have_models;
  return config;
}

namespace {

bool is_url(const std::string& location) {
  return location.rfind("http://", 0) == 0 || location.rfind("https://", 0) == 0;
}

struct CorrFitBundle {
  std::vector<ModelSummary> summaries;
  const CorrFit* dcc = nullptr;
  std::vector<CorrFit> fits;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult result;
  ordered_json manifest;
  manifest["seed"] = config.seed;
  manifest["window"] = {{"start", config.window_start.to_string()},
                        {"end", config.window_end.to_string()}};
  manifest["tolerances"] = {{"adf_level_pct", 5},
                            {"arch_lm_gate_pct", 5},
                            {"target_fixed_point_tol", 1e-8},
                            {"optimizer_grad_tol", 1e-6}};

  // load + window + align
  std::vector<RawSeries> raw;
  ordered_json sources_json = ordered_json::array();
  for (const auto& source : config.sources) {
    RawSeries series =
        is_url(source.location)
            ? fetch_remote_series(source.location, config.cache_dir,
                                  source.date_column, source.value_column)
            : load_series_csv(source.location, source.date_column,
                              source.value_column);
    series.name = source.name;
    raw.push_back(series);
    sources_json.push_back({{"name", source.name},
                            {"location", source.location},
                            {"rows", series.values.size()},
                            {"dropped_rows", series.dropped_rows}});
  }
  manifest["sources"] = sources_json;

  AlignedPanel aligned = window_panel(align_panel(raw), config.window_start,
                                      config.window_end);
  manifest["aligned_t"] = aligned.rows();
  if (aligned.rows() < 30)
    throw InputError("run_pipeline: aligned panel has T < 30");

  // per-series: log decision, ADF on (log-)level, level vs difference
  const Eigen::Index n = aligned.cols();
  std::vector<TransformSpec> log_specs(n), full_specs(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    bool use_log;
    if (config.sources[c].log_override.has_value())
      use_log = *config.sources[c].log_override;
    else
      use_log = (aligned.values.col(c).array() > 0.0).all();
    log_specs[c] = TransformSpec{use_log, 0};
  }
  AlignedPanel levels = apply_transform(aligned, log_specs);

  result.diagnostics.resize(n);
  ordered_json diag_json = ordered_json::array();
  for (Eigen::Index c = 0; c < n; ++c) {
    SeriesDiagnostics diag;
    diag.name = aligned.names[c];
    diag.logged = log_specs[c].use_log;
    diag.adf = adf_test(levels.values.col(c));
    diag.differenced = !diag.adf.reject_unit_root_at_5pct;
    full_specs[c] = TransformSpec{diag.logged, diag.differenced ? 1 : 0};
    result.diagnostics[c] = diag;
  }
  result.panel = apply_transform(aligned, full_specs);
  manifest["estimation_t"] = result.panel.rows();

  // ARMA identification and the heteroskedasticity gate
  std::vector<ArmaSpec> orders(n);
  std::vector<bool> flags(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    auto& diag = result.diagnostics[c];
    diag.arma_order = select_arma_order(result.panel.values.col(c),
                                        config.arma_p_max, config.arma_q_max);
    ArmaFit arma = fit_arma(result.panel.values.col(c), diag.arma_order);
    ArchLmResult arch = arch_lm_test(arma.residuals, config.arch_lm_lags);
    diag.arch_lm_p = arch.p_value;
    diag.garch_flag = arch.heteroskedastic_at_5pct;
    orders[c] = diag.arma_order;
    flags[c] = diag.garch_flag;
    diag_json.push_back({{"series", diag.name},
                         {"log", diag.logged},
                         {"differenced", diag.differenced},
                         {"adf_statistic", diag.adf.statistic},
                         {"adf_lags", diag.adf.lags_used},
                         {"arma_p", diag.arma_order.p},
                         {"arma_q", diag.arma_order.q},
                         {"arch_lm_p", diag.arch_lm_p},
                         {"garch", diag.garch_flag}});
  }
  manifest["diagnostics"] = diag_json;

  result.degarched = first_step(result.panel, orders, flags);

  // second step
  CorrFitBundle bundle;
  ordered_json models_json = ordered_json::array();
  const int t_obs = static_cast<int>(result.panel.rows());
  for (CorrKind kind : config.models) {
    CorrFit fit = fit_corr(result.degarched, kind);
    ModelSummary summary;
    summary.kind = kind;
    summary.params = fit.params;
    summary.robust_se = fit.robust_se;
    summary.loglik = fit.loglik;
    summary.aic = aic(fit.loglik, fit.n_params, t_obs);
    summary.boundary = fit.boundary;
    summary.path = fit.path;
    bundle.summaries.push_back(summary);
    bundle.fits.push_back(std::move(fit));
    ordered_json m = {{"kind", to_string(kind)},
                      {"loglik", summary.loglik},
                      {"aic", summary.aic},
                      {"boundary", summary.boundary},
                      {"target_converged", bundle.fits.back().target_converged},
                      {"min_eigenvalue", bundle.fits.back().path.min_eigenvalue}};
    for (Eigen::Index i = 0; i < summary.params.size(); ++i)
      m["params"].push_back(summary.params(i));
    for (Eigen::Index i = 0; i < summary.robust_se.size(); ++i)
      m["robust_se"].push_back(summary.robust_se(i));
    models_json.push_back(m);
  }
  manifest["models"] = models_json;
  result.models = bundle.summaries;

  auto find_fit = [&](CorrKind kind) -> const CorrFit* {
    for (std::size_t i = 0; i < bundle.fits.size(); ++i)
      if (bundle.fits[i].kind == kind) return &bundle.fits[i];
    return nullptr;
  };
  const CorrFit* ccc = find_fit(CorrKind::CCC);
  const CorrFit* dcc = find_fit(CorrKind::DCC);
  const CorrFit* nlarc = find_fit(CorrKind::NLARC);
  if (ccc && dcc) {
    result.lr_dcc_vs_ccc = lr_test(ccc->loglik, dcc->loglik, 2);
    manifest["lr_dcc_vs_ccc"] = {{"statistic", result.lr_dcc_vs_ccc->statistic},
                                 {"reject_10pct", result.lr_dcc_vs_ccc->reject}};
  }
  if (dcc && nlarc) {
    result.lr_nlarc_vs_dcc = lr_test(dcc->loglik, nlarc->loglik, 1);
    manifest["lr_nlarc_vs_dcc"] = {
        {"statistic", result.lr_nlarc_vs_dcc->statistic},
        {"reject_10pct", result.lr_nlarc_vs_dcc->reject}};
  }

  result.rolling = rolling_correlation(result.degarched, config.rolling_window);
  manifest["rolling_window"] = config.rolling_window;

  result.manifest_json = manifest.dump(2);
  return result;
}

std::string render_table1(const std::vector<SeriesDiagnostics>& diagnostics) {
  std::ostringstream out;
  std::size_t width = 8;
  for (const auto& diag : diagnostics)
    width = std::max(width, diag.name.size() + 2);
  out << "Series";
  out << std::string(width - 5, ' ') << "DGP         p-value ARCH-LM\n";
  for (const auto& diag : diagnostics) {
    std::string label = diag.differenced ? "d_" + diag.name : diag.name;
    std::string dgp = "ARMA(" + std::to_string(diag.arma_order.p) + "," +
                      std::to_string(diag.arma_order.q) + ")";
    out << label << std::string(width + 1 - label.size(), ' ') << dgp
        << std::string(12 - dgp.size(), ' ') << fmt3(diag.arch_lm_p) << "\n";
  }
  return out.str();
}

void write_table1_csv(const std::string& path,
                      const std::vector<SeriesDiagnostics>& diagnostics) {
  csv::Table table;
  table.header = {"series", "differenced", "log", "dgp", "arch_lm_p"};
  for (const auto& diag : diagnostics) {
    table.rows.push_back({diag.name, diag.differenced ? "1" : "0",
                          diag.logged ? "1" : "0",
                          "ARMA(" + std::to_string(diag.arma_order.p) + "," +
                              std::to_string(diag.arma_order.q) + ")",
                          fmt3(diag.arch_lm_p)});
  }
  csv::write_file(path, table);
}

namespace {

// parameter rows shown in Table-2 order
struct ParamView {
  const char* label;
  int index_in_dcc;    // -1 when absent
  int index_in_nlarc;
};

std::string param_of(const ModelSummary& model, const char* label,
                     bool want_se) {
  int idx = -1;
  if (std::string(label) == "a") idx = 0;
  else if (std::string(label) == "b") idx = 1;
  else if (std::string(label) == "phi_A")
    idx = (model.kind == CorrKind::NLARC) ? 2 : -1;
  if (model.kind == CorrKind::CCC) idx = -1;
  if (idx < 0 || idx >= model.params.size()) return "";
  if (want_se) return "(" + fmt3(model.robust_se(idx)) + ")";
  return fmt3(model.params(idx));
}

}  // namespace

std::string render_table2(const std::vector<ModelSummary>& models,
                          const std::optional<LrResult>& lr_dcc_vs_ccc,
                          const std::optional<LrResult>& lr_nlarc_vs_dcc) {
  std::ostringstream out;
  const int col_width = 12;
  auto cell = [&](const std::string& text) {
    out << text << std::string(
        text.size() < col_width ? col_width - text.size() : 1, ' ');
  };
  cell("");
  for (const auto& model : models) cell(to_string(model.kind));
  out << "\n";
  for (const char* label : {"phi_A", "a", "b"}) {
    bool any = false;
    for (const auto& model : models) any |= !param_of(model, label, false).empty();
    if (!any) continue;
    cell(label);
    for (const auto& model : models) cell(param_of(model, label, false));
    out << "\n";
    cell("");
    for (const auto& model : models) cell(param_of(model, label, true));
    out << "\n";
  }
  cell("Log-likelihood");
  for (const auto& model : models) cell(fmt3(model.loglik));
  out << "\n";
  cell("AIC");
  for (const auto& model : models) cell(fmt3(model.aic));
  out << "\n";
  if (lr_dcc_vs_ccc) {
    out << "LR DCC vs CCC    " << fmt3(lr_dcc_vs_ccc->statistic)
        << "   chi2_0.1,2 (" << fmt3(lr_dcc_vs_ccc->critical_value_10pct)
        << ")\n";
  }
  if (lr_nlarc_vs_dcc) {
    out << "LR DCC vs NLARC  " << fmt3(lr_nlarc_vs_dcc->statistic)
        << "   chi2_0.1,1 (" << fmt3(lr_nlarc_vs_dcc->critical_value_10pct)
        << ")\n";
  }
  return out.str();
}

void write_table2_csv(const std::string& path,
                      const std::vector<ModelSummary>& models,
                      const std::optional<LrResult>& lr_dcc_vs_ccc,
                      const std::optional<LrResult>& lr_nlarc_vs_dcc) {
  csv::Table table;
  table.header = {"row"};
  for (const auto& model : models) table.header.push_back(to_string(model.kind));
  auto add_row = [&](const std::string& label,
                     const std::function<std::string(const ModelSummary&)>& fn) {
    std::vector<std::string> row{label};
    for (const auto& model : models) row.push_back(fn(model));
    table.rows.push_back(std::move(row));
  };
  for (const char* label : {"phi_A", "a", "b"}) {
    add_row(label, [&](const ModelSummary& m) { return param_of(m, label, false); });
    add_row(std::string("se_") + label,
            [&](const ModelSummary& m) {
              std::string se = param_of(m, label, true);
              return se.empty() ? se : se.substr(1, se.size() - 2);
            });
  }
  add_row("loglik", [](const ModelSummary& m) { return fmt3(m.loglik); });
  add_row("aic", [](const ModelSummary& m) { return fmt3(m.aic); });
  if (lr_dcc_vs_ccc)
    table.rows.push_back({"lr_dcc_vs_ccc", fmt3(lr_dcc_vs_ccc->statistic)});
  if (lr_nlarc_vs_dcc)
    table.rows.push_back({"lr_dcc_vs_nlarc", fmt3(lr_nlarc_vs_dcc->statistic)});
  csv::write_file(path, table);
}

void write_correlation_path_csv(const std::string& path,
                                const std::vector<Date>& dates,
                                const std::vector<std::string>& names,
                                const CorrelationPath& corr_path) {
  csv::Table table;
  table.header = {"date", "pair", "rho"};
  char buf[40];
  for (std::size_t t = 0; t < corr_path.matrices.size(); ++t) {
    const std::string date =
        t < dates.size() ? dates[t].to_string() : std::to_string(t + 1);
    const auto& r = corr_path.matrices[t];
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      for (Eigen::Index j = i + 1; j < r.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", r(i, j));
        table.rows.push_back({date, names[i] + ":" + names[j], buf});
      }
  }
  csv::write_file(path, table);
}

void write_rolling_csv(const std::string& path,
                       const std::vector<std::string>& names,
                       const RollingPath& rolling) {
  csv::Table table;
  table.header = {"date", "pair", "rho"};
  char buf[40];
  for (Eigen::Index w = 0; w < rolling.values.rows(); ++w) {
    const std::string date = static_cast<std::size_t>(w) < rolling.dates.size()
                                 ? rolling.dates[w].to_string()
                                 : std::to_string(w + rolling.window);
    for (std::size_t pi = 0; pi < rolling.pairs.size(); ++pi) {
      const auto [i, j] = rolling.pairs[pi];
      const double v = rolling.values(w, static_cast<Eigen::Index>(pi));
      if (std::isfinite(v)) std::snprintf(buf, sizeof(buf), "%.17g", v);
      else buf[0] = '\0';
      table.rows.push_back({date, names[i] + ":" + names[j], buf});
    }
  }
  csv::write_file(path, table);
}

void write_artifacts(const PipelineConfig& config, const PipelineResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const fs::path dir(config.output_dir);
  write_panel_csv((dir / "panel.csv").string(), result.panel);

  AlignedPanel degarched_view;
  degarched_view.dates = result.degarched.dates;
  degarched_view.names = result.degarched.names;
  degarched_view.transforms.assign(result.degarched.names.size(), {});
  degarched_view.values = result.degarched.residuals;
  write_panel_csv((dir / "degarched.csv").string(), degarched_view);

  write_table1_csv((dir / "table1.csv").string(), result.diagnostics);
  std::ofstream((dir / "table1.txt")) << render_table1(result.diagnostics);
  write_table2_csv((dir / "table2.csv").string(), result.models,
                   result.lr_dcc_vs_ccc, result.lr_nlarc_vs_dcc);
  std::ofstream((dir / "table2.txt"))
      << render_table2(result.models, result.lr_dcc_vs_ccc,
                       result.lr_nlarc_vs_dcc);
  for (const auto& model : result.models) {
    std::string name = to_string(model.kind);
    std::transform(name.begin(), name.end(), name.begin(), ::tolower);
    write_correlation_path_csv((dir / ("corr_path_" + name + ".csv")).string(),
                               result.degarched.dates, result.degarched.names,
                               model.path);
  }
  write_rolling_csv((dir / "rolling.csv").string(), result.degarched.names,
                    result.rolling);
  std::ofstream((dir / "manifest.json")) << result.manifest_json << "\n";
}

}  // namespace corrkit
