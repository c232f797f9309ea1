#include "gridtrace/frame/wide_frame.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gridtrace/error.hpp"

namespace gridtrace::frame {

SeriesView::SeriesView(std::vector<Timestamp> timestamps, std::vector<Cell> values)
    : timestamps_(std::move(timestamps)), values_(std::move(values)) {
  if (timestamps_.size() != values_.size()) {
    throw Error("misaligned", std::to_string(timestamps_.size()) + " timestamps vs " +
                                  std::to_string(values_.size()) + " values");
  }
  for (std::size_t i = 1; i < timestamps_.size(); ++i) {
    if (!(timestamps_[i - 1] < timestamps_[i])) {
      throw Error("unordered", "timestamp " + format_timestamp(timestamps_[i]) + " out of order");
    }
  }
  for (const auto& v : values_) {
    if (v && !std::isfinite(*v)) throw Error("non-finite", "series contains a non-finite value");
  }
}

SeriesView SeriesView::from_values(const Timestamp& start, std::span<const double> values) {
  std::vector<Timestamp> ts;
  std::vector<Cell> vs;
  ts.reserve(values.size());
  vs.reserve(values.size());
  const long h0 = to_hours(start);
  for (std::size_t i = 0; i < values.size(); ++i) {
    ts.push_back(from_hours(h0 + static_cast<long>(i)));
    vs.emplace_back(values[i]);
  }
  return SeriesView(std::move(ts), std::move(vs));
}

std::optional<std::size_t> SeriesView::index_of(const Timestamp& ts) const {
  auto it = std::lower_bound(timestamps_.begin(), timestamps_.end(), ts);
  if (it == timestamps_.end() || *it != ts) return std::nullopt;
  return static_cast<std::size_t>(it - timestamps_.begin());
}

Cell SeriesView::at(const Timestamp& ts) const {
  auto i = index_of(ts);
  return i ? values_[*i] : std::nullopt;
}

std::vector<double> SeriesView::present_values() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (const auto& v : values_) {
    if (v) out.push_back(*v);
  }
  return out;
}

std::size_t SeriesView::present_count() const {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](const Cell& c) { return c.has_value(); }));
}

WideFrame::WideFrame(FrameMeta meta, std::vector<Date> dates, std::vector<HourRow> rows)
    : meta_(std::move(meta)), dates_(std::move(dates)), rows_(std::move(rows)) {
  if (meta_.unit.empty()) throw Error("bad-frame", "unit must be non-empty");
  if (dates_.size() != rows_.size()) throw Error("misaligned", "date count differs from row count");
  for (std::size_t i = 0; i < dates_.size(); ++i) {
    if (!dates_[i].ok()) throw Error("bad-date", "invalid row date");
    if (i > 0 && !(dates_[i - 1] < dates_[i])) {
      throw Error(dates_[i - 1] == dates_[i] ? "dup-date" : "unordered", format_date(dates_[i]));
    }
    for (const auto& c : rows_[i]) {
      if (c && !std::isfinite(*c)) throw Error("non-finite", "non-finite value on " + format_date(dates_[i]));
    }
  }
}

std::optional<std::size_t> WideFrame::row_index(const Date& d) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
  if (it == dates_.end() || *it != d) return std::nullopt;
  return static_cast<std::size_t>(it - dates_.begin());
}

Cell WideFrame::at(const Date& d, int hour) const {
  if (hour < 0 || hour >= kHoursPerDay) return std::nullopt;
  auto i = row_index(d);
  return i ? rows_[*i][static_cast<std::size_t>(hour)] : std::nullopt;
}

WideFrame WideFrame::with_rows(std::vector<Date> dates, std::vector<HourRow> rows) const {
  return WideFrame(meta_, std::move(dates), std::move(rows));
}

AggregationLevel parse_aggregation_level(const std::string& text) {
  if (text == "hourly") return AggregationLevel::hourly;
  if (text == "daily") return AggregationLevel::daily;
  if (text == "monthly") return AggregationLevel::monthly;
  throw Error("bad-level", "expected hourly|daily|monthly, got '" + text + "'");
}

std::string to_string(AggregationLevel level) {
  switch (level) {
    case AggregationLevel::hourly: return "hourly";
    case AggregationLevel::daily: return "daily";
    case AggregationLevel::monthly: return "monthly";
  }
  return "hourly";
}

Aggregate aggregate(const SeriesView& series, AggregationLevel level) {
  auto period_of = [level](const Timestamp& ts) -> Timestamp {
    switch (level) {
      case AggregationLevel::hourly: return ts;
      case AggregationLevel::daily: return {ts.date, 0};
      case AggregationLevel::monthly: return {Date{ts.date.year(), ts.date.month(), std::chrono::day{1}}, 0};
    }
    return ts;
  };

  std::vector<Timestamp> periods;
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Timestamp p = period_of(series.timestamps()[i]);
    if (periods.empty() || periods.back() != p) {
      periods.push_back(p);
      sums.push_back(0.0);
      counts.push_back(0);
    }
    if (const auto& v = series.values()[i]) {
      sums.back() += *v;
      ++counts.back();
    }
  }
  std::vector<Cell> means(periods.size());
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (counts[i] > 0) means[i] = sums[i] / static_cast<double>(counts[i]);
  }
  return {SeriesView(std::move(periods), std::move(means)), std::move(counts)};
}

SeriesView aggregate_mean(const WideFrame& frame, AggregationLevel level) {
  if (frame.empty()) throw Error("empty-frame", "cannot aggregate a frame with no rows");
  return aggregate(flatten(frame), level).series;
}

SeriesView flatten(const WideFrame& frame) {
  std::vector<Timestamp> ts;
  std::vector<Cell> vs;
  ts.reserve(frame.size() * kHoursPerDay);
  vs.reserve(frame.size() * kHoursPerDay);
  for (std::size_t r = 0; r < frame.size(); ++r) {
    for (int h = 0; h < kHoursPerDay; ++h) {
      ts.push_back({frame.dates()[r], h});
      vs.push_back(frame.rows()[r][static_cast<std::size_t>(h)]);
    }
  }
  return SeriesView(std::move(ts), std::move(vs));
}

WideFrame filter_dates(const WideFrame& frame, const Date& start, const Date& end) {
  if (end < start) throw Error("bad-range", format_date(start) + " is after " + format_date(end));
  std::vector<Date> dates;
  std::vector<HourRow> rows;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Date& d = frame.dates()[i];
    if (!(d < start) && !(end < d)) {
      dates.push_back(d);
      rows.push_back(frame.rows()[i]);
    }
  }
  return frame.with_rows(std::move(dates), std::move(rows));
}

WideFrame to_frame(const SeriesView& series, FrameMeta meta) {
  std::vector<Date> dates;
  std::vector<HourRow> rows;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Timestamp& ts = series.timestamps()[i];
    if (dates.empty() || dates.back() != ts.date) {
      dates.push_back(ts.date);
      rows.emplace_back();
    }
    rows.back()[static_cast<std::size_t>(ts.hour)] = series.values()[i];
  }
  return WideFrame(std::move(meta), std::move(dates), std::move(rows));
}

}  // namespace gridtrace::frame
