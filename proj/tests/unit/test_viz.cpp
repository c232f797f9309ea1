#include <doctest.h>
#include <fstream>

#include <algorithm>
#include <filesystem>
#include <random>
#include <regex>

#include "gridtrace/frame/correlation.hpp"
#include "gridtrace/viz/plot.hpp"
#include "support.hpp"

using namespace gridtrace::viz;
using namespace gridtrace::frame;
using test_support::error_code_of;

namespace {

SeriesView daily(const std::vector<double>& v) {
  std::vector<Timestamp> ts;
  for (std::size_t i = 0; i < v.size(); ++i) ts.push_back({add_days(make_date(2020, 1, 1), static_cast<long>(i)), 0});
  return {ts, std::vector<Cell>(v.begin(), v.end())};
}

double cdf_at(const PlotData& cdf, double x) {
  double f = 0.0;
  for (std::size_t i = 0; i < cdf.x.size() && cdf.x[i] <= x; ++i) f = *cdf.series[0].y[i];
  return f;
}

}  // namespace

TEST_CASE("stacked bar shares") {
  const std::vector<Trace> one{{"coal", daily({50, 80})}, {"rest", daily({150, 20})}};
  const auto p = build_stacked_bar(one, daily({200, 100}));
  CHECK(*p.series[0].y[0] == doctest::Approx(25.0));
  CHECK(*p.series[1].y[1] == doctest::Approx(20.0));
  CHECK(p.x_labels[0] == "2020-01-01T00");

  const std::vector<Trace> single{{"all", daily({7, 9})}};
  const auto whole = build_stacked_bar(single, daily({7, 9}));
  for (const auto& v : whole.series[0].y) CHECK(*v == 100.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<double> a(1000), b(1000), c(1000), t(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
    c[i] = u(rng);
    t[i] = a[i] + b[i] + c[i];
  }
  const std::vector<Trace> three{{"a", daily(a)}, {"b", daily(b)}, {"c", daily(c)}};
  const auto many = build_stacked_bar(three, daily(t));
  REQUIRE(many.x.size() == 1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    const double sum = *many.series[0].y[i] + *many.series[1].y[i] + *many.series[2].y[i];
    CHECK(std::abs(sum - 100.0) <= 1e-9);
    CHECK(*many.series[0].y[i] == doctest::Approx(a[i] / t[i] * 100.0).epsilon(1e-12));
  }

  const std::vector<Trace> zeros{{"x", daily({1, 0})}};
  try {
    build_stacked_bar(zeros, daily({1, 0}));
    FAIL("expected zero-total");
  } catch (const gridtrace::Error& e) {
    CHECK(e.code() == "zero-total");
    CHECK(std::string(e.what()).find("2020-01-02") != std::string::npos);
  }
  CHECK(error_code_of([&] { build_stacked_bar(single, daily({8, 9})); }) == "inconsistent-total");
}

TEST_CASE("boxplot quantiles") {
  std::vector<double> ramp(100);
  for (int i = 0; i < 100; ++i) ramp[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(ramp.begin(), ramp.end(), std::mt19937_64(2));
  const std::vector<BoxColumn> cols{{"ramp", ramp}, {"flat", std::vector<double>(9, 4.0)}};
  const auto p = build_boxplot(cols);
  const double expected[5] = {10.9, 25.75, 50.5, 75.25, 90.1};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(*p.series[0].y[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    CHECK(*p.series[1].y[i] == 4.0);
  }

  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(5 + static_cast<std::size_t>(trial));
    for (auto& e : v) e = z(rng);
    const std::vector<BoxColumn> c{{"r", v}};
    const auto q = build_boxplot(c).series[0].y;
    for (std::size_t i = 1; i < 5; ++i) CHECK(*q[i] >= *q[i - 1]);
    // hand interpolation oracle
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1) * 0.25;
    const auto lo = static_cast<std::size_t>(h);
    CHECK(*q[1] == doctest::Approx(v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo])).epsilon(1e-14));
  }
  const std::vector<BoxColumn> short_col{{"tiny", {1, 2, 3, 4}}};
  CHECK(error_code_of([&] { build_boxplot(short_col); }) == "short-column");
}

TEST_CASE("histogram and cdf") {
  const std::vector<double> one{3.5};
  const auto h1 = build_histogram(one, 1);
  CHECK(*h1.series[1].y[0] == 1.0);
  CHECK(*h1.series[0].y[0] == doctest::Approx(1.0));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> uni(100000);
  for (auto& v : uni) v = u(rng);
  const auto h = build_histogram(uni, 10);
  for (const auto& m : h.series[1].y) CHECK(std::abs(*m - 0.1) <= 0.01);

  std::uniform_int_distribution<int> die(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(static_cast<std::size_t>(10 + trial * 7));
    for (auto& v : s) v = die(rng) * 0.5;
    const int bins = 1 + trial % 13;
    const auto hist = build_histogram(s, bins);
    const auto cdf = build_cdf(s);
    const auto edges = hist.meta["edges"].get<std::vector<double>>();
    REQUIRE(edges.size() == static_cast<std::size_t>(bins) + 1);
    double integral = 0.0, cumulative = 0.0;
    for (std::size_t i = 0; i < hist.x.size(); ++i) {
      integral += *hist.series[0].y[i] * (edges[i + 1] - edges[i]);
      cumulative += *hist.series[1].y[i];
      CHECK(std::abs(cumulative - cdf_at(cdf, edges[i + 1])) <= 1e-9);
    }
    CHECK(std::abs(integral - 1.0) <= 1e-9);
    CHECK(*cdf.series[0].y.back() == 1.0);
    for (double x : cdf.x) {
      const auto le = std::count_if(s.begin(), s.end(), [&](double v) { return v <= x; });
      CHECK(cdf_at(cdf, x) == doctest::Approx(static_cast<double>(le) / static_cast<double>(s.size())));
    }
  }
  CHECK(error_code_of([] { build_histogram(std::vector<double>{}, 3); }) == "empty-sample");
  CHECK(error_code_of([] { build_cdf(std::vector<double>{}); }) == "empty-sample");
  CHECK(error_code_of([&] { build_histogram(one, 0); }) == "bad-spec");
}

TEST_CASE("heatmap uses the pairwise correlation matrix") {
  const auto a = test_support::gaussian(200, 5), b = test_support::gaussian(200, 6);
  std::vector<double> c(200);
  for (std::size_t i = 0; i < 200; ++i) c[i] = a[i] + 0.5 * b[i];
  const std::vector<Trace> traces{{"a", daily(a)}, {"b", daily(b)}, {"c", daily(c)}};
  const auto p = build_heatmap(traces);
  const std::vector<SeriesView> views{traces[0].series, traces[1].series, traces[2].series};
  const auto r = pearson_matrix(views);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(*p.series[static_cast<std::size_t>(i)].y[static_cast<std::size_t>(j)] == r(i, j));
  }
  CHECK(*p.series[0].y[2] == doctest::Approx(pearson(a, c)));
  const std::vector<Trace> flat{{"a", daily(a)}, {"k", daily(std::vector<double>(200, 1.0))}};
  CHECK(error_code_of([&] { build_heatmap(flat); }) == "zero-variance");
}

TEST_CASE("line plots, JSON and SVG rendering") {
  const std::vector<Trace> traces{{"demand", daily({1, 2, 3, 4})},
                                  {"baseline", SeriesView({{make_date(2020, 1, 3), 0}, {make_date(2020, 1, 6), 0}}, {5.0, 6.0})}};
  const auto p = build_line(traces, {{make_date(2020, 1, 3), "lockdown"}});
  CHECK(p.x == std::vector<double>{0, 24, 48, 72, 120});
  CHECK_FALSE(p.series[1].y[0].has_value());
  CHECK(*p.series[1].y[4] == 6.0);

  const auto j = to_json(p);
  CHECK(j["kind"] == "line");
  CHECK(j["series"][1]["y"][0].is_null());
  CHECK(j["events"][0]["date"] == "2020-01-03");
  const auto back = plot_from_json(j);
  CHECK(to_json(back) == j);

  const std::string svg = render_svg(p);
  CHECK(svg == render_svg(p));
  CHECK(svg.find("viewBox=\"0 0 960 540\"") != std::string::npos);
  CHECK(svg.find("class=\"event\"") != std::string::npos);
  CHECK(svg.find(">lockdown</text>") != std::string::npos);

  const auto empty = build_line({});
  const std::string bare = render_svg(empty);
  CHECK(bare.find("class=\"axes\"") != std::string::npos);
  CHECK(bare.find("polyline") == std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "gridtrace_viz_test";
  std::filesystem::create_directories(dir);
  render_svg(p, dir / "a.svg");
  render_svg(p, dir / "b.svg");
  auto slurp = [](const std::filesystem::path& f) {
    std::ifstream in(f, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(dir / "a.svg") == slurp(dir / "b.svg"));
  CHECK(error_code_of([&] { render_svg(p, dir / "missing" / "x.svg"); }) == "io-error");
  std::filesystem::remove_all(dir);

  PlotData bad = p;
  bad.series[0].y[0] = std::numeric_limits<double>::infinity();
  CHECK(error_code_of([&] { bad.validate(); }) == "bad-plot");
  CHECK(error_code_of([] { parse_plot_kind("pie"); }) == "bad-spec");
}

TEST_CASE("stacked bar rectangles are proportional to the shares") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> a(24), b(24), c(24), t(24);
  for (std::size_t i = 0; i < 24; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
    c[i] = i % 5 == 0 ? 0.0 : u(rng);
    t[i] = a[i] + b[i] + c[i];
  }
  const std::vector<Trace> traces{{"a", daily(a)}, {"b", daily(b)}, {"c", daily(c)}};
  const auto p = build_stacked_bar(traces, daily(t));
  const std::string svg = render_svg(p);
  const std::regex rect(R"re(<rect class="bar" data-bar="(\d+)" data-series="(\d+)" x="[^"]+" y="([^"]+)" width="[^"]+" height="([^"]+)")re");
  std::size_t count = 0;
  const PlotArea area;
  std::vector<double> stacked(24, 0.0);
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator(); ++it) {
    const auto bar = std::stoul((*it)[1]);
    const auto k = std::stoul((*it)[2]);
    const double share = *p.series[k].y[bar];
    CHECK(std::abs(std::stod((*it)[4]) - share / 100.0 * area.height) <= 0.5);
    const double expected_top = area.top + area.height * (1.0 - (stacked[bar] + share) / 100.0);
    CHECK(std::abs(std::stod((*it)[3]) - expected_top) <= 0.5);
    stacked[bar] += share;
    ++count;
  }
  CHECK(count == 24 * 3);
}

TEST_CASE("other kinds render") {
  const auto g = test_support::gaussian(500, 9);
  const std::vector<BoxColumn> cols{{"g", g}};
  for (const auto& p : {build_histogram(g, 20), build_cdf(g), build_boxplot(cols), build_scatter(g, g, "self")}) {
    const auto s = render_svg(p);
    CHECK(s.rfind("<?xml", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("nan") == std::string::npos);
  }
  CHECK(error_code_of([&] { build_scatter(g, std::vector<double>{1.0}, "x"); }) == "misaligned");
}
