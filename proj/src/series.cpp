#include "corrkit/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "corrkit/csv.hpp"
#include "corrkit/errors.hpp"

namespace corrkit {

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

namespace {

bool valid_date(int y, int m, int d) {
  static const int days_in[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1 || y < 1800 || y > 3000) return false;
  int dm = days_in[m - 1];
  if (m == 2 && (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0))) dm = 29;
  return d <= dm;
}

std::optional<double> parse_value(const std::string& text) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  if (begin == end) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

std::optional<Date> Date::parse(const std::string& text) {
  int y = 0, m = 0, d = 0;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%d-%d-%d%c", &y, &m, &d, &extra) == 3 &&
      valid_date(y, m, d))
    return Date{y, m, d};
  if (std::sscanf(text.c_str(), "%d/%d/%d%c", &m, &d, &y, &extra) == 3 &&
      valid_date(y, m, d))
    return Date{y, m, d};
  return std::nullopt;
}

RawSeries parse_series_csv(const std::string& text,
                           const std::string& date_column,
                           const std::string& value_column,
                           const std::string& source) {
  csv::Table table = csv::parse(text);
  const int dcol = table.column_index(date_column);
  const int vcol = table.column_index(value_column);
  if (dcol < 0) throw InputError("series: missing column '" + date_column + "' in " + source);
  if (vcol < 0) throw InputError("series: missing column '" + value_column + "' in " + source);

  std::map<Date, double> by_date;
  int dropped = 0;
  for (const auto& row : table.rows) {
    if (static_cast<int>(row.size()) <= std::max(dcol, vcol)) {
      ++dropped;
      continue;
    }
    auto date = Date::parse(row[dcol]);
    if (!date) {
      ++dropped;
      continue;
    }
    auto value = parse_value(row[vcol]);
    if (!value) {
      ++dropped;
      continue;
    }
    if (by_date.count(*date))
      throw InputError("series: duplicate timestamp " + date->to_string() +
                       " in " + source);
    by_date.emplace(*date, *value);
  }
  if (by_date.empty())
    throw InputError("series: zero parseable rows in " + source);

  RawSeries series;
  series.name = value_column;
  series.source = source;
  series.dropped_rows = dropped;
  series.dates.reserve(by_date.size());
  series.values.reserve(by_date.size());
  for (const auto& [date, value] : by_date) {
    series.dates.push_back(date);
    series.values.push_back(value);
  }
  return series;
}

RawSeries load_series_csv(const std::string& path,
                          const std::string& date_column,
                          const std::string& value_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("series: cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_series_csv(buf.str(), date_column, value_column, path);
}

AlignedPanel align_panel(const std::vector<RawSeries>& series) {
  if (series.size() < 2)
    throw InputError("align_panel: need at least 2 series");
  // intersection of date sets
  std::set<Date> common(series[0].dates.begin(), series[0].dates.end());
  for (std::size_t s = 1; s < series.size(); ++s) {
    std::set<Date> next;
    std::set<Date> cur(series[s].dates.begin(), series[s].dates.end());
    std::set_intersection(common.begin(), common.end(), cur.begin(), cur.end(),
                          std::inserter(next, next.begin()));
    common.swap(next);
  }
  if (common.empty())
    throw InputError("align_panel: empty date intersection");

  AlignedPanel panel;
  panel.dates.assign(common.begin(), common.end());
  panel.values.resize(static_cast<Eigen::Index>(panel.dates.size()),
                      static_cast<Eigen::Index>(series.size()));
  panel.names.reserve(series.size());
  panel.transforms.assign(series.size(), TransformSpec{});
  for (std::size_t s = 0; s < series.size(); ++s) {
    panel.names.push_back(series[s].name);
    std::map<Date, double> lookup;
    for (std::size_t i = 0; i < series[s].dates.size(); ++i)
      lookup.emplace(series[s].dates[i], series[s].values[i]);
    for (std::size_t t = 0; t < panel.dates.size(); ++t)
      panel.values(static_cast<Eigen::Index>(t),
                   static_cast<Eigen::Index>(s)) = lookup.at(panel.dates[t]);
  }
  return panel;
}

AlignedPanel window_panel(const AlignedPanel& panel, const Date& start,
                          const Date& end) {
  if (!(start < end)) throw InputError("window: start must precede end");
  std::vector<Eigen::Index> keep;
  for (std::size_t t = 0; t < panel.dates.size(); ++t)
    if (!(panel.dates[t] < start) && !(end < panel.dates[t]))
      keep.push_back(static_cast<Eigen::Index>(t));
  if (keep.empty()) throw InputError("window: no observations in range");
  AlignedPanel out;
  out.names = panel.names;
  out.transforms = panel.transforms;
  out.values.resize(static_cast<Eigen::Index>(keep.size()), panel.cols());
  out.dates.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.dates.push_back(panel.dates[keep[i]]);
    out.values.row(static_cast<Eigen::Index>(i)) = panel.values.row(keep[i]);
  }
  return out;
}

AlignedPanel apply_transform(const AlignedPanel& panel,
                             const std::vector<TransformSpec>& specs) {
  if (specs.size() != static_cast<std::size_t>(panel.cols()))
    throw InputError("apply_transform: one spec per column required");
  int max_diff = 0;
  for (const auto& spec : specs) {
    if (spec.differencing_order < 0 || spec.differencing_order > 1)
      throw InputError("apply_transform: differencing order must be 0 or 1");
    max_diff = std::max(max_diff, spec.differencing_order);
  }
  const Eigen::Index t_in = panel.rows();
  if (t_in <= max_diff)
    throw InputError("apply_transform: panel too short for differencing");

  Eigen::MatrixXd staged = panel.values;
  for (Eigen::Index c = 0; c < panel.cols(); ++c) {
    if (specs[c].use_log) {
      if ((staged.col(c).array() <= 0.0).any())
        throw InputError("apply_transform: log requested on non-positive column '" +
                         panel.names[c] + "'");
      staged.col(c) = staged.col(c).array().log();
    }
  }

  AlignedPanel out;
  out.names = panel.names;
  out.transforms = specs;
  const Eigen::Index t_out = t_in - max_diff;
  out.values.resize(t_out, panel.cols());
  out.dates.assign(panel.dates.begin() + max_diff, panel.dates.end());
  for (Eigen::Index c = 0; c < panel.cols(); ++c) {
    if (specs[c].differencing_order == 1) {
      out.values.col(c) =
          staged.col(c).tail(t_out) - staged.col(c).segment(t_in - t_out - 1, t_out);
    } else {
      out.values.col(c) = staged.col(c).tail(t_out);
    }
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_panel_csv(const std::string& path, const AlignedPanel& panel) {
  csv::Table table;
  table.header.push_back("date");
  for (const auto& name : panel.names) table.header.push_back(name);
  for (Eigen::Index t = 0; t < panel.rows(); ++t) {
    std::vector<std::string> row;
    row.push_back(panel.dates[t].to_string());
    for (Eigen::Index c = 0; c < panel.cols(); ++c)
      row.push_back(format_double(panel.values(t, c)));
    table.rows.push_back(std::move(row));
  }
  csv::write_file(path, table);
}

AlignedPanel read_panel_csv(const std::string& path) {
  csv::Table table = csv::read_file(path);
  if (table.header.empty() || table.header[0] != "date")
    throw InputError("panel csv: first column must be 'date'");
  const std::size_t n = table.header.size() - 1;
  if (n == 0) throw InputError("panel csv: no series columns");
  AlignedPanel panel;
  panel.names.assign(table.header.begin() + 1, table.header.end());
  panel.transforms.assign(n, TransformSpec{});
  panel.values.resize(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < table.rows.size(); ++t) {
    const auto& row = table.rows[t];
    if (row.size() != n + 1) throw InputError("panel csv: ragged row");
    auto date = Date::parse(row[0]);
    if (!date) throw InputError("panel csv: bad date: " + row[0]);
    panel.dates.push_back(*date);
    for (std::size_t c = 0; c < n; ++c) {
      auto v = parse_value(row[c + 1]);
      if (!v) throw InputError("panel csv: bad value: " + row[c + 1]);
      panel.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = *v;
    }
  }
  if (panel.dates.empty()) throw InputError("panel csv: no rows");
  return panel;
}

}  // namespace corrkit
