#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridtrace/frame/calendar.hpp"

namespace gridtrace::frame {

inline constexpr int kHoursPerDay = 24;

using Cell = std::optional<double>;
using HourRow = std::array<Cell, kHoursPerDay>;

struct FrameMeta {
  std::string region;
  std::string variable;
  std::string unit;
};

/// Chronologically ordered hourly series; missing values are std::nullopt.
class SeriesView {
 public:
  SeriesView() = default;
  /// Throws Error("misaligned") on length mismatch, Error("unordered") on
  /// non-increasing timestamps, Error("non-finite") on NaN/inf values.
  SeriesView(std::vector<Timestamp> timestamps, std::vector<Cell> values);

  static SeriesView from_values(const Timestamp& start, std::span<const double> values);

  const std::vector<Timestamp>& timestamps() const { return timestamps_; }
  const std::vector<Cell>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::optional<std::size_t> index_of(const Timestamp& ts) const;
  Cell at(const Timestamp& ts) const;

  std::vector<double> present_values() const;
  std::size_t present_count() const;

 private:
  std::vector<Timestamp> timestamps_;
  std::vector<Cell> values_;
};

/// Date-by-hour matrix of one variable for one region.
class WideFrame {
 public:
  WideFrame() = default;
  /// Rows must be strictly increasing by date; values finite; unit non-empty.
  WideFrame(FrameMeta meta, std::vector<Date> dates, std::vector<HourRow> rows);

  const FrameMeta& meta() const { return meta_; }
  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<HourRow>& rows() const { return rows_; }
  std::size_t size() const { return dates_.size(); }
  bool empty() const { return dates_.empty(); }

  std::optional<std::size_t> row_index(const Date& d) const;
  Cell at(const Date& d, int hour) const;
  Cell at(const Timestamp& ts) const { return at(ts.date, ts.hour); }

  WideFrame with_rows(std::vector<Date> dates, std::vector<HourRow> rows) const;

 private:
  FrameMeta meta_;
  std::vector<Date> dates_;
  std::vector<HourRow> rows_;
};

enum class AggregationLevel { hourly, daily, monthly };

AggregationLevel parse_aggregation_level(const std::string& text);
std::string to_string(AggregationLevel level);

/// Aggregated series plus the number of present values behind each period.
struct Aggregate {
  SeriesView series;
  std::vector<std::size_t> counts;
};

/// Period means over present values. Daily periods are stamped at hour 0,
/// monthly periods at hour 0 of the first day of the month.
Aggregate aggregate(const SeriesView& series, AggregationLevel level);

/// Throws Error("empty-frame") when the frame has no rows.
SeriesView aggregate_mean(const WideFrame& frame, AggregationLevel level);

SeriesView flatten(const WideFrame& frame);

/// Rows with start <= date <= end. Throws Error("bad-range") when start > end.
WideFrame filter_dates(const WideFrame& frame, const Date& start, const Date& end);

/// Builds a frame from an hourly series. Timestamps sharing a date fill one row.
WideFrame to_frame(const SeriesView& series, FrameMeta meta);

}  // namespace gridtrace::frame
