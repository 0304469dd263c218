#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "corrkit/errors.hpp"
#include "corrkit/pipeline.hpp"
#include "corrkit/simulate.hpp"
#include "doctest.h"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"

using namespace corrkit;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("corrkit_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Synthetic daily price levels: exp of a driftless random walk in logs, so
// the pipeline logs the level, fails the unit-root test, and differences.
void write_price_csvs(const fs::path& dir, int n_series, int t_obs,
                      std::uint64_t seed) {
  SimSpec spec;
  spec.kind = SimKind::Dcc;
  spec.n = n_series;
  spec.length = t_obs;
  spec.corr = {0.05, 0.90, 0.0};
  spec.garch_layer = true;
  spec.garch = {0.05, 0.08, 0.85};
  spec.r_bar = Eigen::MatrixXd::Constant(n_series, n_series, 0.4);
  spec.r_bar.diagonal().setOnes();
  spec.seed = seed;
  CorrPanelSim sim = simulate_corr_panel(spec);

  Date d{2018, 1, 2};
  std::vector<Date> dates;
  for (int t = 0; t <= t_obs; ++t) {  // one extra row: levels, not returns
    dates.push_back(d);
    ++d.day;
    if (d.day > 28) { d.day = 1; ++d.month; }
    if (d.month > 12) { d.month = 1; ++d.year; }
  }
  for (int j = 0; j < n_series; ++j) {
    std::ofstream out(dir / ("s" + std::to_string(j) + ".csv"));
    out << "date,value\n";
    double log_level = 2.0;
    out << dates[0].to_string() << "," << std::exp(log_level) << "\n";
    for (int t = 0; t < t_obs; ++t) {
      log_level += 0.01 * sim.y(t, j);
      out << dates[t + 1].to_string() << "," << std::exp(log_level) << "\n";
    }
  }
}

PipelineConfig file_config(const fs::path& data_dir, const fs::path& out_dir,
                           int n_series) {
  PipelineConfig cfg;
  for (int j = 0; j < n_series; ++j) {
    SeriesSource src;
    src.name = "s" + std::to_string(j);
    src.location = (data_dir / (src.name + ".csv")).string();
    cfg.sources.push_back(src);
  }
  cfg.window_start = {2018, 1, 1};
  cfg.window_end = {2030, 1, 1};
  cfg.arma_p_max = 1;
  cfg.arma_q_max = 1;
  cfg.output_dir = out_dir.string();
  cfg.cache_dir = (out_dir / "cache").string();
  return cfg;
}

}  // namespace

TEST_CASE("load_config round trip and error paths") {
  fs::path dir = fresh_dir("config");
  fs::path cfg_path = dir / "run.ini";
  {
    std::ofstream out(cfg_path);
    out << "[series.gas]\n"
           "location = data/gas.csv\n"
           "date_column = Day\n"
           "value_column = Price\n"
           "log = true\n"
           "[series.oil]\n"
           "location = http://example.test/oil.csv\n"
           "[window]\n"
           "start = 2020-05-01\n"
           "end = 2021-01-30\n"
           "[estimation]\n"
           "models = ccc, dcc, nlarc\n"
           "arch_lm_lags = 4\n"
           "arma_p_max = 2\n"
           "arma_q_max = 2\n"
           "rolling_window = 7\n"
           "[output]\n"
           "dir = results\n"
           "cache_dir = mycache\n";
  }
  PipelineConfig cfg = load_config(cfg_path.string());
  REQUIRE(cfg.sources.size() == 2);
  CHECK(cfg.sources[0].name == "gas");
  CHECK(cfg.sources[0].date_column == "Day");
  CHECK(cfg.sources[0].value_column == "Price");
  REQUIRE(cfg.sources[0].log_override.has_value());
  CHECK(*cfg.sources[0].log_override);
  CHECK_FALSE(cfg.sources[1].log_override.has_value());
  CHECK((cfg.window_start == Date{2020, 5, 1}));
  CHECK((cfg.window_end == Date{2021, 1, 30}));
  CHECK(cfg.arch_lm_lags == 4);
  CHECK(cfg.arma_p_max == 2);
  CHECK(cfg.rolling_window == 7);
  CHECK(cfg.models.size() == 3);
  CHECK(cfg.output_dir == "results");
  CHECK(cfg.cache_dir == "mycache");

  {
    std::ofstream out(dir / "bad_key.ini");
    out << "[window]\nstart = 2020-01-01\nend = 2021-01-01\nfrobnicate = 1\n";
  }
  CHECK_THROWS_AS(load_config((dir / "bad_key.ini").string()), InputError);
  {
    std::ofstream out(dir / "bad_section.ini");
    out << "[windows]\nstart = 2020-01-01\n";
  }
  CHECK_THROWS_AS(load_config((dir / "bad_section.ini").string()), InputError);
  CHECK_THROWS_AS(load_config((dir / "missing.ini").string()), InputError);
}

TEST_CASE("remote fetch: served payload, cache hit, and failure paths") {
  fs::path dir = fresh_dir("fetch");
  std::string payload = "date,value\n";
  {
    Date d{2019, 6, 3};
    Rng rng(91);
    for (int t = 0; t < 166; ++t) {
      payload += d.to_string() + "," + std::to_string(100.0 + rng.normal()) + "\n";
      ++d.day;
      if (d.day > 28) { d.day = 1; ++d.month; }
    }
  }

  httplib::Server server;
  std::atomic<int> hits{0};
  server.Get("/ok.csv", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.set_content(payload, "text/csv");
  });
  server.Get("/garbage.csv",
             [&](const httplib::Request&, httplib::Response& res) {
               res.set_content("not,a\nseries,file\n", "text/csv");
             });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  std::string base = "http://127.0.0.1:" + std::to_string(port);
  std::string cache = (dir / "cache").string();

  RawSeries first = fetch_remote_series(base + "/ok.csv", cache, "date", "value");
  CHECK(first.dates.size() == 166);
  CHECK(hits == 1);
  CHECK(fs::exists(cache_path_for_url(cache, base + "/ok.csv")));

  RawSeries second = fetch_remote_series(base + "/ok.csv", cache, "date", "value");
  CHECK(hits == 1);  // served from the cache, no second request
  CHECK(second.values == first.values);

  std::string missing = base + "/absent.csv";
  CHECK_THROWS_AS(fetch_remote_series(missing, cache, "date", "value"),
                  NetworkError);
  CHECK_FALSE(fs::exists(cache_path_for_url(cache, missing)));

  std::string garbage = base + "/garbage.csv";
  CHECK_THROWS_AS(fetch_remote_series(garbage, cache, "date", "value"),
                  InputError);
  CHECK_FALSE(fs::exists(cache_path_for_url(cache, garbage)));

  server.stop();
  server_thread.join();

  // server is down; the cached series must still load
  RawSeries offline = fetch_remote_series(base + "/ok.csv", cache, "date", "value");
  CHECK(offline.values == first.values);
  CHECK_THROWS_AS(fetch_remote_series(base + "/never-seen.csv", cache, "date",
                                      "value"),
                  NetworkError);
}

TEST_CASE("end-to-end run over file sources" * doctest::timeout(600)) {
  fs::path data = fresh_dir("e2e_data");
  fs::path out = fresh_dir("e2e_out");
  write_price_csvs(data, 3, 220, 400);
  PipelineConfig cfg = file_config(data, out, 3);

  PipelineResult result = run_pipeline(cfg);
  REQUIRE(result.diagnostics.size() == 3);
  for (const auto& diag : result.diagnostics) {
    CHECK(diag.logged);       // strictly positive levels
    CHECK(diag.differenced);  // random walk in logs
  }
  REQUIRE(result.models.size() == 3);
  CHECK(result.models[0].kind == CorrKind::CCC);
  CHECK(result.models[1].kind == CorrKind::DCC);
  CHECK(result.models[2].kind == CorrKind::NLARC);
  CHECK(result.models[1].loglik >= result.models[0].loglik - 1e-6);
  CHECK(result.models[2].loglik >= result.models[1].loglik - 1e-6);
  REQUIRE(result.lr_dcc_vs_ccc.has_value());
  REQUIRE(result.lr_nlarc_vs_dcc.has_value());
  CHECK(result.lr_dcc_vs_ccc->dof == 2);
  CHECK(result.lr_nlarc_vs_dcc->dof == 1);
  CHECK(result.degarched.residuals.rows() == result.panel.rows());
  CHECK(result.rolling.pairs.size() == 3);
  CHECK_FALSE(result.manifest_json.empty());

  write_artifacts(cfg, result);
  for (const char* name :
       {"panel.csv", "degarched.csv", "table1.csv", "table1.txt", "table2.csv",
        "table2.txt", "rolling.csv", "manifest.json", "corr_path_ccc.csv",
        "corr_path_dcc.csv", "corr_path_nlarc.csv"}) {
    CHECK_MESSAGE(fs::exists(out / name), name);
  }

  std::string table2 = read_file(out / "table2.txt");
  CHECK(table2.find("CCC") != std::string::npos);
  CHECK(table2.find("DCC") != std::string::npos);
  CHECK(table2.find("NLARC") != std::string::npos);

  // byte-identical artifacts on a re-run
  fs::path out2 = fresh_dir("e2e_out2");
  PipelineConfig cfg2 = file_config(data, out2, 3);
  PipelineResult result2 = run_pipeline(cfg2);
  write_artifacts(cfg2, result2);
  CHECK(result2.manifest_json == result.manifest_json);
  for (const char* name : {"panel.csv", "degarched.csv", "table1.csv",
                           "table2.csv", "rolling.csv", "corr_path_dcc.csv"}) {
    CHECK_MESSAGE(read_file(out / name) == read_file(out2 / name), name);
  }
}

TEST_CASE("pipeline rejects panels shorter than 30 observations") {
  fs::path data = fresh_dir("short_data");
  fs::path out = fresh_dir("short_out");
  write_price_csvs(data, 2, 60, 500);
  PipelineConfig cfg = file_config(data, out, 2);
  cfg.window_end = {2018, 1, 25};  // leaves only a couple of weeks
  CHECK_THROWS_AS(run_pipeline(cfg), InputError);
}
