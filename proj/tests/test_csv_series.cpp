#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "corrkit/csv.hpp"
#include "corrkit/errors.hpp"
#include "corrkit/series.hpp"
#include "doctest.h"

using namespace corrkit;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
  fs::path path = fs::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("csv round-trips quoting") {
  csv::Table table;
  table.header = {"a", "b"};
  table.rows = {{"plain", "with,comma"}, {"with\"quote", "line\nbreak"}};
  std::ostringstream out;
  csv::write(out, table);
  csv::Table back = csv::parse(out.str());
  CHECK(back.header == table.header);
  CHECK(back.rows == table.rows);
}

TEST_CASE("load_series_csv parses and sorts") {
  auto path = temp_file("corrkit_s1.csv",
                        "date,value\n2020-03-06,28.1\n2020-03-05,27.6\n");
  RawSeries series = load_series_csv(path.string(), "date", "value");
  REQUIRE(series.values.size() == 2);
  CHECK(series.dates[0] == Date{2020, 3, 5});
  CHECK(series.values[0] == doctest::Approx(27.6));
  CHECK(series.dropped_rows == 0);
}

TEST_CASE("load_series_csv accepts US dates") {
  auto path = temp_file("corrkit_s2.csv", "date,value\n3/5/2020,1\n3/6/2020,2\n");
  RawSeries series = load_series_csv(path.string(), "date", "value");
  CHECK(series.dates[0] == Date{2020, 3, 5});
}

TEST_CASE("duplicate timestamps are rejected") {
  auto path = temp_file("corrkit_s3.csv",
                        "date,value\n2020-03-05,1\n2020-03-05,2\n");
  CHECK_THROWS_WITH_AS(load_series_csv(path.string(), "date", "value"),
                       doctest::Contains("duplicate timestamp"), InputError);
}

TEST_CASE("blank values are dropped and counted") {
  std::string body = "date,value\n";
  for (int d = 1; d <= 10; ++d)
    body += "2020-04-0" + std::string(d < 10 ? 1 : 0, '0') +
            std::to_string(d) + "," + (d == 7 ? "" : std::to_string(d)) + "\n";
  // simpler: explicit construction
  body = "date,value\n";
  for (int d = 1; d <= 10; ++d) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "2020-04-%02d,%s\n", d,
                  d == 7 ? "" : std::to_string(d).c_str());
    body += buf;
  }
  auto path = temp_file("corrkit_s4.csv", body);
  RawSeries series = load_series_csv(path.string(), "date", "value");
  CHECK(series.values.size() == 9);
  CHECK(series.dropped_rows == 1);
}

TEST_CASE("missing file and missing column errors") {
  CHECK_THROWS_AS(load_series_csv("/nonexistent.csv", "date", "value"),
                  InputError);
  auto path = temp_file("corrkit_s5.csv", "date,value\n2020-01-01,1\n");
  CHECK_THROWS_AS(load_series_csv(path.string(), "date", "nope"), InputError);
}

TEST_CASE("align keeps exactly the common dates") {
  RawSeries a{"a", {{2020, 1, 1}, {2020, 1, 2}, {2020, 1, 3}, {2020, 1, 4}, {2020, 1, 5}},
              {1, 2, 3, 4, 5}, "mem"};
  RawSeries b{"b", {{2020, 1, 2}, {2020, 1, 3}, {2020, 1, 5}}, {20, 30, 50}, "mem"};
  AlignedPanel panel = align_panel({a, b});
  REQUIRE(panel.rows() == 3);
  CHECK(panel.dates[0] == Date{2020, 1, 2});
  CHECK(panel.values(2, 0) == 5);
  CHECK(panel.values(2, 1) == 50);
}

TEST_CASE("align on identical grids is the identity") {
  RawSeries a{"a", {{2020, 1, 1}, {2020, 1, 2}}, {1, 2}, "mem"};
  RawSeries b{"b", {{2020, 1, 1}, {2020, 1, 2}}, {3, 4}, "mem"};
  AlignedPanel panel = align_panel({a, b});
  CHECK(panel.rows() == 2);
}

TEST_CASE("align with empty intersection fails") {
  RawSeries a{"a", {{2020, 1, 1}}, {1}, "mem"};
  RawSeries b{"b", {{2020, 1, 2}}, {2}, "mem"};
  CHECK_THROWS_AS(align_panel({a, b}), InputError);
}

TEST_CASE("mixed-calendar alignment matches a brute-force date intersection") {
  // 7-day series vs business-day series over ~2 months
  std::mt19937_64 gen(7);
  auto add_days = [](Date d, int k) {
    for (int i = 0; i < k; ++i) {
      if (++d.day > 28) { d.day = 1; ++d.month; }
    }
    return d;
  };
  RawSeries daily{"polls", {}, {}, "mem"};
  RawSeries busy{"vix", {}, {}, "mem"};
  Date cur{2020, 3, 1};
  for (int i = 0; i < 56; ++i) {
    Date d = add_days(Date{2020, 3, 1}, i);
    daily.dates.push_back(d);
    daily.values.push_back(i);
    if (i % 7 != 5 && i % 7 != 6) {  // weekday-ish pattern
      busy.dates.push_back(d);
      busy.values.push_back(10 * i);
    }
  }
  (void)cur;
  AlignedPanel panel = align_panel({daily, busy});
  std::set<Date> d1(daily.dates.begin(), daily.dates.end());
  std::set<Date> d2(busy.dates.begin(), busy.dates.end());
  std::set<Date> inter;
  for (const auto& d : d1)
    if (d2.count(d)) inter.insert(d);
  CHECK(static_cast<std::size_t>(panel.rows()) == inter.size());
}

TEST_CASE("log + diff transform example") {
  const double e = std::exp(1.0);
  RawSeries a{"a", {{2020, 1, 1}, {2020, 1, 2}, {2020, 1, 3}}, {1, e, e * e}, "mem"};
  RawSeries b{"b", {{2020, 1, 1}, {2020, 1, 2}, {2020, 1, 3}}, {1, 1, 1}, "mem"};
  AlignedPanel panel = align_panel({a, b});
  AlignedPanel out = apply_transform(panel, {{true, 1}, {false, 1}});
  REQUIRE(out.rows() == 2);
  CHECK(out.values(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.values(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identity transform returns the input") {
  RawSeries a{"a", {{2020, 1, 1}, {2020, 1, 2}}, {1.5, 2.5}, "mem"};
  RawSeries b{"b", {{2020, 1, 1}, {2020, 1, 2}}, {3, 4}, "mem"};
  AlignedPanel panel = align_panel({a, b});
  AlignedPanel out = apply_transform(panel, {{false, 0}, {false, 0}});
  CHECK((out.values - panel.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("log on a non-positive column is rejected") {
  RawSeries a{"a", {{2020, 1, 1}, {2020, 1, 2}}, {1.0, -0.3}, "mem"};
  RawSeries b{"b", {{2020, 1, 1}, {2020, 1, 2}}, {1, 2}, "mem"};
  AlignedPanel panel = align_panel({a, b});
  CHECK_THROWS_AS(apply_transform(panel, {{true, 0}, {false, 0}}), InputError);
}

TEST_CASE("differencing reconstructs the level by cumulative summation") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  RawSeries a{"a", {}, {}, "mem"}, b{"b", {}, {}, "mem"};
  double level = 5.0;
  for (int i = 0; i < 40; ++i) {
    Date d{2020, 1 + i / 28, 1 + i % 28};
    level += unif(gen) - 1.2;
    a.dates.push_back(d);
    a.values.push_back(std::fabs(level) + 1.0);
    b.dates.push_back(d);
    b.values.push_back(unif(gen));
  }
  AlignedPanel panel = align_panel({a, b});
  AlignedPanel out = apply_transform(panel, {{false, 1}, {false, 0}});
  CHECK(out.rows() == panel.rows() - 1);
  double rebuilt = panel.values(0, 0);
  for (Eigen::Index t = 0; t < out.rows(); ++t) {
    rebuilt += out.values(t, 0);
    CHECK(rebuilt == doctest::Approx(panel.values(t + 1, 0)).epsilon(1e-12));
  }
}

TEST_CASE("panel csv round-trip is byte-deterministic") {
  RawSeries a{"a", {{2020, 1, 1}, {2020, 1, 2}}, {1.123456789012345, 2}, "mem"};
  RawSeries b{"b", {{2020, 1, 1}, {2020, 1, 2}}, {3, 4}, "mem"};
  AlignedPanel panel = align_panel({a, b});
  auto p1 = fs::temp_directory_path() / "corrkit_p1.csv";
  auto p2 = fs::temp_directory_path() / "corrkit_p2.csv";
  write_panel_csv(p1.string(), panel);
  write_panel_csv(p2.string(), panel);
  std::ifstream f1(p1), f2(p2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  AlignedPanel back = read_panel_csv(p1.string());
  CHECK((back.values - panel.values).cwiseAbs().maxCoeff() == 0.0);
}
