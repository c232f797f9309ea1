#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridtrace/frame/wide_frame.hpp"
#include "gridtrace/learners/arma.hpp"

namespace gridtrace::baseline {

using frame::Cell;
using frame::Date;
using frame::SeriesView;
using frame::Timestamp;

struct BaselineMeta {
  std::vector<int> source_years;
  std::optional<int> window;
  /// Targets whose source value was absent.
  std::vector<Timestamp> missing;
  std::vector<std::string> notes;
};

/// Counterfactual estimate: one value per target timestamp (absent where no source existed).
struct BaselineSeries {
  std::string method;
  std::vector<Timestamp> timestamps;
  std::vector<Cell> values;
  BaselineMeta meta;

  SeriesView as_series() const { return {timestamps, values}; }
  Cell at(const Timestamp& ts) const;
};

/// Baseline at (y, m, d, t) is the observation at (y - years_back, m, d, t);
/// Feb 29 reads Feb 28. Targets default to every cell of the frame.
BaselineSeries date_aligned(const frame::WideFrame& frame, int years_back);
BaselineSeries date_aligned(const frame::WideFrame& frame, int years_back, std::span<const Date> targets);

/// As date_aligned through the 364-day week alignment (same weekday).
BaselineSeries week_aligned(const frame::WideFrame& frame, int years_back);
BaselineSeries week_aligned(const frame::WideFrame& frame, int years_back, std::span<const Date> targets);

/// Date-aligned lookup inside an arbitrary series (hourly, daily or monthly stamps).
BaselineSeries shift_years(const SeriesView& series, int years_back, std::string method);

/// Centred moving average over w points. Near the edges the window shrinks
/// symmetrically; an even w uses the 2 x w form (half weights on the two end
/// points). Missing points are skipped and the weights renormalized.
/// Errors: "bad-window" (w < 1), "short-series" (fewer than w points).
SeriesView trend_ma(const SeriesView& series, int w);

struct TrendModel {
  SeriesView fitted;  // one-step in-sample fit; absent for the first d + p points
  learners::ArmaModel model;
};

/// ARMA trend on a gap-free series. Errors: "missing-values" plus those of fit_arma_css.
TrendModel trend_model(const SeriesView& series, learners::ArmaOrder order);

/// Baseline T_{y'mdt} for every timestamp of the trend.
BaselineSeries trend_baseline(const SeriesView& trend, int years_back);

/// The trend itself as the baseline of the raw series. Errors: "misaligned".
BaselineSeries detrend_baseline(const SeriesView& series, const SeriesView& trend);

/// observed - baseline where both are present. Errors: "misaligned".
SeriesView residual(const SeriesView& observed, const BaselineSeries& baseline);

}  // namespace gridtrace::baseline
