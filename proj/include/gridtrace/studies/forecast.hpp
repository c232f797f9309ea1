#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridtrace/baseline/backcast.hpp"

namespace gridtrace::studies {

using frame::Date;
using frame::SeriesView;

/// Mean of |a - p| / |a| x 100. Errors: "misaligned", "zero-actual" (names the timestamp),
/// "empty-window".
double mape(const SeriesView& actual, std::span<const double> predicted);
double mape(std::span<const double> actual, std::span<const double> predicted);

struct DateWindow {
  Date first;
  Date last;
};

struct EnhancementInputs {
  baseline::FeatureSet features;  // base-model regressors, hourly
  SeriesView demand;
  /// Daily indicators (stamped at hour 0) whose previous-day value corrects the
  /// base forecast, e.g. mobility.
  std::vector<baseline::NamedSeries> enhancers;
  learners::LearnerSpec base{learners::RidgeSpec{1.0}};
  Date event;              // base model trains strictly before this date
  DateWindow calibration;  // residuals used to fit the corrections
  DateWindow normal;
  DateWindow lockdown;
};

struct ModelScore {
  std::string model;
  std::optional<double> normal_mape;
  double lockdown_mape = 0.0;
  double improvement = 0.0;  // percentage points below the base model on the lockdown window
  std::vector<double> correction;  // intercept and slope of the residual fit, when applicable
};

struct ForecastEnhancementReport {
  std::vector<ModelScore> scores;  // base, updated, then one per enhancer
  const ModelScore& score(const std::string& model) const;
};

/// Base model, the base model refitted with calibration-window observations
/// ("updated"), and one residual-corrected model per enhancer.
/// Errors: "no-calibration-data", "short-series", "empty-window".
ForecastEnhancementReport mobility_enhanced_forecast(const EnhancementInputs& inputs);

}  // namespace gridtrace::studies
