#pragma once

#include <array>
#include <vector>

#include "gridtrace/baseline/probabilistic.hpp"
#include "gridtrace/frame/wide_frame.hpp"
#include "gridtrace/learners/arma.hpp"

namespace gridtrace::studies {

using frame::Date;
using frame::SeriesView;

/// Daily peak comparison behind a monthly reduction rate.
struct PeakDay {
  Date date;
  double baseline;  // baseline peak
  double observed;  // max of the hourly demand
  double reduction;  // (baseline - observed) / baseline x 100
};

struct MonthlyReduction {
  int year = 0;
  unsigned month = 0;
  double alpha = 0.0;  // mean daily reduction in percent
  std::vector<PeakDay> days;
};

/// Peak-demand reduction for one month. The baseline may be daily or hourly;
/// hourly baselines are reduced to their daily maximum. Days lacking either side
/// are skipped. Errors: "zero-baseline", "empty-month" (no usable day).
MonthlyReduction peak_demand_reduction(const frame::WideFrame& demand, const baseline::BaselineSeries& baseline, int year,
                                       unsigned month);

/// Every month with at least one usable day, in order.
std::vector<MonthlyReduction> peak_demand_report(const frame::WideFrame& demand, const baseline::BaselineSeries& baseline);

struct ProbabilisticReduction {
  int year = 0;
  unsigned month = 0;
  std::array<double, 5> alpha{};  // one rate per quantile track, same order as kQuantileLevels
  double width_50 = 0.0;          // alpha(q75) - alpha(q25)
  double width_80 = 0.0;          // alpha(q90) - alpha(q10)
  /// The q10..q90 rates straddle zero, so the sign of the reduction is uncertain.
  bool crosses_zero = false;
};

/// The monthly rate evaluated against each quantile track.
ProbabilisticReduction probabilistic_peak_reduction(const frame::WideFrame& demand,
                                                    const baseline::ProbabilisticBaseline& pb, int year, unsigned month);

struct DuckCurveReport {
  std::array<double, 24> profile{};  // mean residual demand per hour of day
  double max_ramp = 0.0;             // largest increase between consecutive hours
  int ramp_hour = 0;                 // hour at which that increase ends
  double range = 0.0;                // max - min of the profile
  std::size_t days = 0;
};

/// Residual demand (demand - solar) averaged over [first, last] by hour of day.
/// Errors: "unit-mismatch", "bad-range", "no-overlap" (an hour with no pair).
DuckCurveReport duck_curve(const frame::WideFrame& demand, const frame::WideFrame& solar, const Date& first,
                           const Date& last);

/// Sum of the hydro, solar and wind percentages per month.
/// Errors: "misaligned", "bad-share" (a share outside [0, 100]), "share-overflow".
SeriesView renewable_share(const SeriesView& hydro, const SeriesView& solar, const SeriesView& wind);

struct RenewableBaseline {
  learners::ArmaModel model;
  baseline::BaselineSeries baseline;  // forecasts over the study months
  double observed_mean = 0.0;
  double baseline_mean = 0.0;
};

/// ARMA fitted on the months before `study_start`, forecast over the rest.
/// Errors: "bad-range" (no study months) plus those of the ARMA fit.
RenewableBaseline renewable_baseline(const SeriesView& share, const Date& study_start,
                                     learners::ArmaOrder order = {2, 0, 1});

}  // namespace gridtrace::studies
