#pragma once

#include <Eigen/Dense>
#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace corrkit {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;
  std::string to_string() const;  // ISO-8601

  // Accepts ISO-8601 (2020-03-05) and US m/d/Y (3/5/2020).
  static std::optional<Date> parse(const std::string& text);
};

struct RawSeries {
  std::string name;
  std::vector<Date> dates;   // strictly increasing
  std::vector<double> values;
  std::string source;
  int dropped_rows = 0;  // rows with unparseable values
};

struct TransformSpec {
  bool use_log = false;
  int differencing_order = 0;  // 0 or 1
};

struct AlignedPanel {
  std::vector<Date> dates;
  Eigen::MatrixXd values;  // T x N
  std::vector<std::string> names;
  std::vector<TransformSpec> transforms;  // applied transforms, per column

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

RawSeries load_series_csv(const std::string& path,
                          const std::string& date_column,
                          const std::string& value_column);

// Parses series rows out of an already-loaded CSV text (shared by the file
// and URL loaders).
RawSeries parse_series_csv(const std::string& text,
                           const std::string& date_column,
                           const std::string& value_column,
                           const std::string& source);

// GETs a CSV endpoint, caching the raw response bytes under cache_dir
// (filename = hash of URL). Cached responses are served without network.
RawSeries fetch_remote_series(const std::string& url,
                              const std::string& cache_dir,
                              const std::string& date_column,
                              const std::string& value_column);

std::string cache_path_for_url(const std::string& cache_dir,
                               const std::string& url);

// Inner join: keeps exactly the dates at which every series is observed.
AlignedPanel align_panel(const std::vector<RawSeries>& series);

// Restricts the panel to [start, end] inclusive.
AlignedPanel window_panel(const AlignedPanel& panel, const Date& start,
                          const Date& end);

AlignedPanel apply_transform(const AlignedPanel& panel,
                             const std::vector<TransformSpec>& specs);

void write_panel_csv(const std::string& path, const AlignedPanel& panel);
AlignedPanel read_panel_csv(const std::string& path);

}  // namespace corrkit
