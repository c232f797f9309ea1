#include "gridtrace/baseline/series.hpp"

#include <algorithm>
#include <cmath>

#include "gridtrace/error.hpp"

namespace gridtrace::baseline {

Cell BaselineSeries::at(const Timestamp& ts) const {
  const auto it = std::lower_bound(timestamps.begin(), timestamps.end(), ts);
  if (it == timestamps.end() || *it != ts) return std::nullopt;
  return values[static_cast<std::size_t>(it - timestamps.begin())];
}

namespace {

template <typename Align>
BaselineSeries aligned(const frame::WideFrame& frame, int years_back, std::span<const Date> targets, Align align,
                       std::string method) {
  if (years_back < 0) throw Error("bad-spec", "years_back must be >= 0");
  BaselineSeries b;
  b.method = std::move(method);
  for (const Date& d : targets) {
    const Date source = align(d, years_back);
    const int sy = frame::year_of(source);
    if (std::find(b.meta.source_years.begin(), b.meta.source_years.end(), sy) == b.meta.source_years.end()) {
      b.meta.source_years.push_back(sy);
    }
    for (int h = 0; h < frame::kHoursPerDay; ++h) {
      const Timestamp ts{d, h};
      const Cell v = frame.at(source, h);
      b.timestamps.push_back(ts);
      b.values.push_back(v);
      if (!v) b.meta.missing.push_back(ts);
    }
  }
  std::sort(b.meta.source_years.begin(), b.meta.source_years.end());
  return b;
}

}  // namespace

BaselineSeries date_aligned(const frame::WideFrame& frame, int years_back) {
  return date_aligned(frame, years_back, frame.dates());
}

BaselineSeries date_aligned(const frame::WideFrame& frame, int years_back, std::span<const Date> targets) {
  return aligned(frame, years_back, targets, frame::align_date, "date-aligned");
}

BaselineSeries week_aligned(const frame::WideFrame& frame, int years_back) {
  return week_aligned(frame, years_back, frame.dates());
}

BaselineSeries week_aligned(const frame::WideFrame& frame, int years_back, std::span<const Date> targets) {
  return aligned(frame, years_back, targets, frame::align_week, "week-aligned");
}

BaselineSeries shift_years(const SeriesView& series, int years_back, std::string method) {
  if (years_back < 0) throw Error("bad-spec", "years_back must be >= 0");
  BaselineSeries b;
  b.method = std::move(method);
  for (const auto& ts : series.timestamps()) {
    const Timestamp source{frame::align_date(ts.date, years_back), ts.hour};
    const Cell v = series.at(source);
    b.timestamps.push_back(ts);
    b.values.push_back(v);
    if (!v) b.meta.missing.push_back(ts);
    const int sy = frame::year_of(source.date);
    if (std::find(b.meta.source_years.begin(), b.meta.source_years.end(), sy) == b.meta.source_years.end()) {
      b.meta.source_years.push_back(sy);
    }
  }
  std::sort(b.meta.source_years.begin(), b.meta.source_years.end());
  return b;
}

SeriesView trend_ma(const SeriesView& series, int w) {
  if (w < 1) throw Error("bad-window", "window must be >= 1");
  const auto n = series.size();
  if (n < static_cast<std::size_t>(w)) {
    throw Error("short-series", std::to_string(n) + " points for a window of " + std::to_string(w));
  }
  const auto& v = series.values();
  const auto half = static_cast<std::size_t>(w / 2);
  const bool even = w % 2 == 0;
  std::vector<Cell> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t reach = std::min({half, i, n - 1 - i});
    const bool two_by = even && reach == half;
    double sum = 0.0, weight = 0.0;
    for (std::size_t j = i - reach; j <= i + reach; ++j) {
      if (!v[j]) continue;
      const double wt = two_by && (j == i - reach || j == i + reach) ? 0.5 : 1.0;
      sum += wt * *v[j];
      weight += wt;
    }
    if (weight > 0.0) out[i] = sum / weight;
  }
  return {series.timestamps(), std::move(out)};
}

TrendModel trend_model(const SeriesView& series, learners::ArmaOrder order) {
  std::vector<double> x;
  x.reserve(series.size());
  for (const auto& c : series.values()) {
    if (!c) throw Error("missing-values", "ARMA trend needs a gap-free series; repair it first");
    x.push_back(*c);
  }
  TrendModel t{{}, learners::fit_arma_css(x, order)};
  t.fitted = SeriesView(series.timestamps(), t.model.fitted());
  return t;
}

BaselineSeries trend_baseline(const SeriesView& trend, int years_back) {
  return shift_years(trend, years_back, "trend");
}

BaselineSeries detrend_baseline(const SeriesView& series, const SeriesView& trend) {
  if (series.timestamps() != trend.timestamps()) throw Error("misaligned", "series and trend timestamps differ");
  BaselineSeries b;
  b.method = "detrend";
  b.timestamps = trend.timestamps();
  b.values = trend.values();
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    if (!b.values[i]) b.meta.missing.push_back(b.timestamps[i]);
  }
  return b;
}

SeriesView residual(const SeriesView& observed, const BaselineSeries& baseline) {
  if (observed.timestamps() != baseline.timestamps) throw Error("misaligned", "observed and baseline timestamps differ");
  std::vector<Cell> out(observed.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& o = observed.values()[i];
    const auto& b = baseline.values[i];
    if (o && b) out[i] = *o - *b;
  }
  return {observed.timestamps(), std::move(out)};
}

}  // namespace gridtrace::baseline
