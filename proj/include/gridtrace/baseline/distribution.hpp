#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridtrace/baseline/series.hpp"

namespace gridtrace::baseline {

inline constexpr std::size_t kMinWindowSamples = 30;

/// Sup-norm distance between the empirical CDFs of two samples, in [0, 1].
/// Errors: "empty-window".
double distribution_distance(std::span<const double> a, std::span<const double> b);

/// Mid-rank ECDF of `x` against `sorted_window`:
/// (#{s < x} + #{s = x} / 2 + 1/2) / (n + 1).
double midrank_cdf(std::span<const double> sorted_window, double x);

/// |1 - 2 F(x)| with the mid-rank ECDF above.
double fluctuation_value(std::span<const double> sorted_window, double x);

struct WindowSpec {
  enum class Kind { trailing, calendar_month };
  Kind kind = Kind::trailing;
  int hours = 720;  // trailing length

  static WindowSpec trailing(int hours) { return {Kind::trailing, hours}; }
  static WindowSpec month() { return {Kind::calendar_month, 0}; }
  std::string describe() const;
  /// "month" or a positive hour count.
  static WindowSpec parse(const std::string& text);
};

struct FluctuationSeries {
  WindowSpec window;
  SeriesView index;  // absent where x is absent or the window holds < 30 values
};

/// Trailing windows use the present values of the `hours` preceding hours.
/// Month windows use every other present value of the same calendar month.
/// Errors: "small-window" (trailing length below 30).
FluctuationSeries fluctuation_index(const SeriesView& series, const WindowSpec& window);

/// Hourly: I_{y'mdt}; daily or monthly: period means compared year over year.
BaselineSeries index_baseline(const FluctuationSeries& idx, int years_back, frame::AggregationLevel level);

}  // namespace gridtrace::baseline
