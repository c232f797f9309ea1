#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gridtrace/frame/csv.hpp"
#include "gridtrace/ingest/quality.hpp"
#include "support.hpp"

using namespace gridtrace::ingest;
using namespace gridtrace::frame;
using test_support::error_code_of;
using test_support::make_frame;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  auto dir = std::filesystem::temp_directory_path() / "gridtrace_ingest_tests";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

std::string header(int hours = 24) {
  std::string h = "date";
  for (int i = 0; i < hours; ++i) h += "," + std::to_string(i);
  return h + "\n";
}

std::string row(const std::string& date, double v) {
  std::string r = date;
  for (int i = 0; i < 24; ++i) r += "," + format_number(v + i);
  return r + "\n";
}

}  // namespace

TEST_CASE("load_csv parses a valid file") {
  auto p = write_temp("ok.csv", header() + row("2020-01-02", 10) + row("2020-01-01", 0));
  auto f = load_csv(p, "ERCOT", "demand", "MW");
  CHECK(f.size() == 2);
  CHECK(f.rows()[0].size() == 24);
  CHECK(f.dates()[0] == make_date(2020, 1, 1));
  CHECK(*f.at(make_date(2020, 1, 2), 3) == 13.0);
  CHECK(f.meta().region == "ERCOT");
}

TEST_CASE("load_csv rejects malformed input") {
  CHECK(error_code_of([] { load_csv(write_temp("h23.csv", header(23) + row("2020-01-01", 0)), "r", "v", "MW"); }) ==
        "bad-header");
  CHECK(error_code_of([] { load_csv(write_temp("d.csv", header() + row("2020-04-31", 0)), "r", "v", "MW"); }) ==
        "bad-cell");
  CHECK(error_code_of([] {
          load_csv(write_temp("dup.csv", header() + row("2020-01-01", 0) + row("2020-01-01", 1)), "r", "v", "MW");
        }) == "dup-date");
  CHECK(error_code_of([] { load_csv("/nonexistent/nope.csv", "r", "v", "MW"); }) == "io-error");

  std::string bad = "2020-01-01,1,2,x";
  for (int i = 3; i < 24; ++i) bad += ",1";
  try {
    load_csv(write_temp("cell.csv", header() + bad + "\n"), "r", "v", "MW");
    FAIL("expected bad-cell");
  } catch (const gridtrace::Error& e) {
    CHECK(e.code() == "bad-cell");
    CHECK(std::string(e.what()).find("row 2 column 2") != std::string::npos);
  }
}

TEST_CASE("detect_outliers on constant series") {
  QualityRule rule;
  rule.z_threshold = 5.0;
  rule.window_days = 3;
  auto flat = make_frame(make_date(2020, 1, 1), 10, [](std::size_t, int) { return 7.0; });
  CHECK(detect_outliers(flat, rule).empty());

  auto spiky = make_frame(make_date(2020, 1, 1), 10, [](std::size_t d, int h) { return d == 4 && h == 9 ? 700.0 : 7.0; });
  auto flags = detect_outliers(spiky, rule);
  REQUIRE(flags.size() == 1);
  CHECK(flags[0] == make_timestamp(2020, 1, 5, 9));

  rule.window_days = 10;
  CHECK(error_code_of([&] { detect_outliers(spiky, rule); }) == "window-too-long");
}

TEST_CASE("detect_outliers finds injected 8-sigma spikes in AR(1) data") {
  const double phi = 0.7;
  const double marginal_sd = 1.0 / std::sqrt(1.0 - phi * phi);
  QualityRule rule;
  rule.z_threshold = 5.0;
  rule.window_days = 7;
  int exact = 0;
  for (unsigned seed = 0; seed < 100; ++seed) {
    auto x = test_support::ar1(30 * 24, phi, seed);
    const std::size_t spikes[] = {100, 377, 610};
    for (std::size_t k = 0; k < 3; ++k) x[spikes[k]] += (k % 2 == 0 ? 8.0 : -8.0) * marginal_sd;
    auto f = make_frame(make_date(2020, 1, 1), 30, [&](std::size_t d, int h) { return x[d * 24 + std::size_t(h)]; });
    auto flags = detect_outliers(f, rule);
    bool ok = flags.size() == 3;
    for (std::size_t k = 0; ok && k < 3; ++k) ok = to_hours(flags[k]) - to_hours(make_timestamp(2020, 1, 1, 0)) == long(spikes[k]);
    exact += ok;
  }
  CHECK(exact >= 95);
}

TEST_CASE("detect_outliers is invariant under positive affine transforms") {
  auto x = test_support::gaussian(20 * 24, 11);
  x[50] += 9.0;
  x[300] -= 7.0;
  QualityRule rule;
  rule.z_threshold = 3.0;
  auto f1 = make_frame(make_date(2021, 5, 1), 20, [&](std::size_t d, int h) { return x[d * 24 + std::size_t(h)]; });
  auto f2 = make_frame(make_date(2021, 5, 1), 20,
                       [&](std::size_t d, int h) { return 250.0 + 4.0 * x[d * 24 + std::size_t(h)]; });
  CHECK(detect_outliers(f1, rule) == detect_outliers(f2, rule));
  CHECK_FALSE(detect_outliers(f1, rule).empty());
}

TEST_CASE("fill_missing interpolates short gaps") {
  auto f = make_frame(make_date(2020, 1, 1), 1, [](std::size_t, int h) -> Cell {
    if (h == 1) return std::nullopt;
    return h == 0 ? 1.0 : 3.0;
  });
  auto [filled, report] = fill_missing(f, QualityRule{});
  CHECK(*filled.at(make_date(2020, 1, 1), 1) == 2.0);
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].action == QualityAction::filled_interpolate);
  CHECK(*report.entries[0].new_value == 2.0);
}

TEST_CASE("fill_missing uses week-aligned values for long gaps") {
  // 2019-06-01 .. 2020-06-10; 48-hour gap on 2020-06-03/04
  const Date start = make_date(2019, 6, 1);
  auto f = make_frame(start, 376, [&](std::size_t d, int h) -> Cell {
    const Date date = add_days(start, long(d));
    if (date == make_date(2020, 6, 3) || date == make_date(2020, 6, 4)) return std::nullopt;
    return double(d) * 100.0 + h;
  });
  auto [filled, report] = fill_missing(f, QualityRule{});
  CHECK(report.count(QualityAction::filled_week_aligned) == 48);
  CHECK(report.count(QualityAction::filled_interpolate) == 0);
  for (int h = 0; h < 24; ++h) {
    CHECK(*filled.at(make_date(2020, 6, 3), h) == *f.at(align_week(make_date(2020, 6, 3), 1), h));
  }
}

TEST_CASE("fill_missing leaves long gaps without history missing") {
  auto f = make_frame(make_date(2020, 6, 1), 6, [](std::size_t d, int) -> Cell {
    if (d == 2 || d == 3) return std::nullopt;
    return 5.0;
  });
  auto [filled, report] = fill_missing(f, QualityRule{});
  CHECK(report.count(QualityAction::left_missing) == 48);
  CHECK_FALSE(filled.at(make_date(2020, 6, 3), 0).has_value());
  std::ostringstream out;
  write_quality_jsonl(out, report);
  CHECK(out.str().rfind("{\"ts\":\"2020-06-03T00\",\"action\":\"left-missing\",\"old\":null,\"new\":null}\n", 0) == 0);
}

TEST_CASE("fill_missing never touches present cells and is idempotent") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution drop(0.15), long_gap(0.02);
    std::normal_distribution<double> noise(100.0, 10.0);
    int gap_left = 0;
    auto f = make_frame(make_date(2019, 1, 1), 400, [&](std::size_t, int) -> Cell {
      const double v = noise(rng);
      if (gap_left > 0) {
        --gap_left;
        return std::nullopt;
      }
      if (long_gap(rng)) gap_left = 30;
      return drop(rng) ? std::nullopt : Cell(v);
    });
    auto [once, r1] = fill_missing(f, QualityRule{});
    for (std::size_t r = 0; r < f.size(); ++r) {
      for (std::size_t h = 0; h < 24; ++h) {
        if (f.rows()[r][h]) REQUIRE(once.rows()[r][h] == f.rows()[r][h]);
      }
    }
    auto [twice, r2] = fill_missing(once, QualityRule{});
    CHECK(twice.rows() == once.rows());
    CHECK(r2.count(QualityAction::filled_interpolate) + r2.count(QualityAction::filled_week_aligned) == 0);
    CHECK(r2.count(QualityAction::left_missing) == r1.count(QualityAction::left_missing));
    // one entry per missing input cell
    std::size_t missing = 0;
    for (const auto& row : f.rows())
      for (const auto& c : row) missing += !c;
    CHECK(r1.entries.size() == missing);
  }
}

TEST_CASE("fill_missing on a fully repairable frame gives an empty second report") {
  auto f = make_frame(make_date(2020, 1, 1), 5, [](std::size_t d, int h) -> Cell {
    if (h % 5 == 2) return std::nullopt;
    return double(d + h);
  });
  auto [once, r1] = fill_missing(f, QualityRule{});
  CHECK(r1.count(QualityAction::filled_interpolate) == r1.entries.size());
  auto [twice, r2] = fill_missing(once, QualityRule{});
  CHECK(r2.empty());
}

TEST_CASE("quality rule validation") {
  QualityRule r;
  r.max_gap_hours = 0;
  CHECK(error_code_of([&] { r.validate(); }) == "bad-rule");
  r = QualityRule{};
  r.z_threshold = -1;
  CHECK(error_code_of([&] { r.validate(); }) == "bad-rule");
}
