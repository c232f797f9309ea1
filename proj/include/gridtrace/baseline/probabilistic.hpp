#pragma once

#include <array>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gridtrace/baseline/backcast.hpp"

namespace gridtrace::baseline {

inline constexpr std::array<double, 5> kQuantileLevels{0.10, 0.25, 0.50, 0.75, 0.90};

enum class ProbabilisticFamily { trend, backcast };

std::string to_string(ProbabilisticFamily f);
ProbabilisticFamily parse_family(const std::string& text);

struct ProbabilisticSpec {
  ProbabilisticFamily family = ProbabilisticFamily::backcast;
  /// Ridge (lambda) or MLP base learner; its loss is replaced by the pinball level.
  learners::LearnerSpec base{learners::RidgeSpec{0.0}};
};

/// Five quantile tracks per timestamp, non-decreasing in the level.
struct ProbabilisticBaseline {
  ProbabilisticFamily family = ProbabilisticFamily::backcast;
  std::vector<Timestamp> timestamps;
  std::array<std::vector<double>, 5> tracks;
  /// Timestamps where the raw model outputs crossed and were re-sorted.
  std::size_t rearranged = 0;

  /// Track for one of the five levels; Error("bad-quantile") otherwise.
  const std::vector<double>& track(double q) const;
  /// Median track as a point baseline.
  BaselineSeries median() const;
};

/// Trend-family regressors: elapsed years since `origin`, plus daily and annual
/// harmonics (sin/cos, `harmonics` of each).
FeatureSet trend_features(const std::vector<Timestamp>& timestamps, const Timestamp& origin, int harmonics = 2);

/// Fits one pinball-loss model per level on pre-event rows, predicts the horizon,
/// then sorts the five outputs at each timestamp. Errors as backcast.
ProbabilisticBaseline probabilistic_baseline(const FeatureSet& features, const SeriesView& target,
                                             const ProbabilisticSpec& spec, const BackcastWindow& window);

/// 50 -> (q25, q75); 80 -> (q10, q90). Errors: "unsupported-level".
std::pair<std::vector<double>, std::vector<double>> confidence_interval(const ProbabilisticBaseline& pb, int level);

/// `timestamp,observed,baseline[,q10,q25,q50,q75,q90]`; absent values are empty cells.
/// With a probabilistic baseline the baseline column is the median track.
void write_baseline_csv(std::ostream& out, const SeriesView& observed, const BaselineSeries& baseline);
void write_baseline_csv(std::ostream& out, const SeriesView& observed, const ProbabilisticBaseline& baseline);

}  // namespace gridtrace::baseline
