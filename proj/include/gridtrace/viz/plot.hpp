#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridtrace/frame/wide_frame.hpp"

namespace gridtrace::viz {

enum class PlotKind { line, scatter, stacked_bar, histogram, cdf, boxplot, heatmap };

std::string to_string(PlotKind kind);
/// Accepts the names produced by to_string ("stacked-bar", ...). Errors: "bad-spec".
PlotKind parse_plot_kind(const std::string& text);

struct EventMarker {
  frame::Date date;
  std::string label;
};

struct Trace {
  std::string name;
  frame::SeriesView series;
};

/// One named y-array aligned with PlotData::x; absent points are gaps.
struct PlotSeries {
  std::string name;
  std::vector<frame::Cell> y;
};

struct PlotData {
  PlotKind kind = PlotKind::line;
  std::vector<double> x;
  std::vector<std::string> x_labels;  // empty or one per x
  std::vector<PlotSeries> series;
  std::vector<EventMarker> events;
  std::string title;
  std::string x_label;
  std::string y_label;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();

  /// Error("bad-plot") on non-finite numbers or inconsistent lengths.
  void validate() const;
};

/// Type-7 empirical quantile of an ascending sample: h = (n - 1) q, linear between order statistics.
double empirical_quantile(std::span<const double> sorted, double q);

inline constexpr std::array<double, 5> kBoxLevels{0.10, 0.25, 0.50, 0.75, 0.90};

/// Percent shares per bar (one bar per timestamp of `total`). Categories must add
/// up to the total within 1e-6 relative ("inconsistent-total"); bars with an absent
/// value are skipped. Errors: "zero-total" naming the bar.
PlotData build_stacked_bar(std::span<const Trace> categories, const frame::SeriesView& total);

struct BoxColumn {
  std::string name;
  std::vector<double> values;
};

/// Five quantiles per column at kBoxLevels. Errors: "short-column" (< 5 values).
PlotData build_boxplot(std::span<const BoxColumn> columns);

/// Equal-width density histogram. Bins are (lo, hi] except the first, which also
/// holds the minimum, so cumulative masses match the right-continuous CDF at edges.
/// Errors: "empty-sample", "bad-spec" (bins < 1).
PlotData build_histogram(std::span<const double> sample, int bins);

/// Step ECDF over the distinct sample values. Errors: "empty-sample".
PlotData build_cdf(std::span<const double> sample);

/// Pearson matrix of the traces; rows become series.
PlotData build_heatmap(std::span<const Trace> traces);

/// Traces on a shared hourly axis (hours since the earliest timestamp).
PlotData build_line(std::span<const Trace> traces, std::vector<EventMarker> events = {});

/// Paired samples. Errors: "misaligned".
PlotData build_scatter(std::span<const double> x, std::span<const double> y, const std::string& name);

nlohmann::ordered_json to_json(const PlotData& plot);
/// Errors: "bad-plot".
PlotData plot_from_json(const nlohmann::ordered_json& j);

inline constexpr double kCanvasWidth = 960.0;
inline constexpr double kCanvasHeight = 540.0;

struct PlotArea {
  double left = 80.0;
  double top = 50.0;
  double width = 850.0;
  double height = 420.0;
};

/// SVG 1.1 document; identical input gives identical bytes.
std::string render_svg(const PlotData& plot);
/// Errors: "io-error".
void render_svg(const PlotData& plot, const std::filesystem::path& path);

}  // namespace gridtrace::viz
