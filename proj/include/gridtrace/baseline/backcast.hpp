#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridtrace/baseline/series.hpp"
#include "gridtrace/learners/model.hpp"

namespace gridtrace::baseline {

/// Feature rows keyed by timestamp (strictly increasing).
struct FeatureSet {
  std::vector<Timestamp> timestamps;
  learners::FeatureMatrix x;

  /// Throws Error("misaligned") unless timestamps match the rows.
  void validate() const;
  std::vector<Eigen::Index> rows_between(const Date& first, const Date& last) const;
};

struct NamedSeries {
  std::string name;
  SeriesView series;
};

struct FeatureOptions {
  bool hour_of_day = true;      // sin/cos of the hour
  bool day_of_year = true;      // sin/cos of the annual cycle
  bool weekday = true;          // Monday..Saturday indicators
  bool week_aligned_lag = true; // target value 364 days earlier, same hour
};

/// Calendar terms, covariates (e.g. temperature) and an optional week-aligned
/// lag of `lag_source`. Rows where any input is absent are dropped.
FeatureSet build_features(const std::vector<Timestamp>& timestamps, const std::vector<NamedSeries>& covariates,
                          const SeriesView* lag_source, const FeatureOptions& options = {});

/// Fitted ensemble: predictions are the mean of the member predictions.
class Ensemble {
 public:
  Ensemble() = default;
  /// Throws Error("empty-ensemble") for no members, Error("bad-features") for
  /// members with different feature schemas, Error("bad-spec") for ARMA members.
  explicit Ensemble(std::vector<learners::FittedModel> members);

  bool fitted() const { return !members_.empty(); }
  const std::vector<learners::FittedModel>& members() const { return members_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  /// Throws Error("not-fitted") when empty.
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

 private:
  std::vector<learners::FittedModel> members_;
  std::vector<std::string> names_;
};

Ensemble ensemble_average(std::vector<learners::FittedModel> models);

using EnsembleSpec = std::vector<learners::LearnerSpec>;

Ensemble fit_ensemble(const EnsembleSpec& spec, const learners::FeatureMatrix& x, std::span<const double> y);

struct BackcastWindow {
  Date event_start;    // training uses rows strictly before this date
  Date horizon_first;  // baseline produced for these dates
  Date horizon_last;
};

/// Trains on pre-event rows with a present target and predicts the horizon.
/// Errors: "misaligned", "short-series" (no training rows), "empty-ensemble".
BaselineSeries backcast(const FeatureSet& features, const SeriesView& target, const EnsembleSpec& spec,
                        const BackcastWindow& window);

}  // namespace gridtrace::baseline
