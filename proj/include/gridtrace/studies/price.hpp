#pragma once

#include <string>
#include <vector>

#include "gridtrace/baseline/distribution.hpp"
#include "gridtrace/regress/ols.hpp"

namespace gridtrace::studies {

using frame::Date;
using frame::SeriesView;
using frame::Timestamp;

inline constexpr double kExtremeThreshold = 0.9544;

enum class Bucket { weekly, monthly };

Bucket parse_bucket(const std::string& text);
std::string to_string(Bucket b);

struct BucketCount {
  Date start;                // first day of the bucket
  std::size_t flagged = 0;   // hours with index >= threshold
  std::size_t indexed = 0;   // hours with a defined index
};

struct ExtremeCounts {
  Bucket bucket = Bucket::weekly;
  double threshold = kExtremeThreshold;
  std::vector<BucketCount> buckets;
  std::size_t flagged = 0;
  std::size_t indexed = 0;
};

/// Hours with a fluctuation index at or above `threshold`, per bucket. Weekly
/// buckets are 7-day blocks anchored on the Monday on or before the first day,
/// so a block shifted by 364 days is again a block.
ExtremeCounts extreme_price_count(const SeriesView& price, const baseline::WindowSpec& window,
                                  double threshold = kExtremeThreshold, Bucket bucket = Bucket::weekly);

/// Same counting on a precomputed index.
ExtremeCounts count_extremes(const SeriesView& index, double threshold, Bucket bucket);

enum class LoiBand { normal, unusual, highly_unusual };

std::string to_string(LoiBand band);
/// unusual for 0.75 <= v <= 3, highly unusual above 3.
LoiBand classify_loi(double value);

struct LoiSeries {
  SeriesView values;
  std::vector<LoiBand> bands;            // one per present value, in order
  std::vector<Timestamp> clamped;        // inputs moved inside the bounds
};

/// ln(I / (1 - I)) with I clamped to [1/(n+1), n/(n+1)] for window size n.
/// Errors: "bad-window" (n < 1), "bad-index" (I outside [0, 1]).
LoiSeries loi(const SeriesView& index, std::size_t window_samples);

/// Daily mean fluctuation index.
SeriesView daily_index(const baseline::FluctuationSeries& index);

/// 0 before the event date, 1 on and after it, for each timestamp.
SeriesView pandemic_dummy(const std::vector<Timestamp>& timestamps, const Date& event);

/// Daily series aligned by date for the price regressions.
struct PriceStudyInputs {
  SeriesView response;  // daily logit index
  SeriesView gas;       // gas price
  SeriesView cases;     // confirmed cases
  SeriesView pandemic;  // 0/1 dummy
};

struct PriceRegression {
  regress::OLSReport ols;
  std::vector<bool> significant;  // per coefficient at the 5% level
  std::size_t dropped_rows = 0;   // dates missing one of the inputs
};

/// loi ~ gas:pandemic + gas + pandemic + 1.
/// Errors: "bad-dummy" (values other than 0/1) plus those of fit_ols.
PriceRegression price_regression_dummy(const PriceStudyInputs& inputs);

/// loi ~ gas + cases + gas:cases + 1. Errors: "negative-cases" plus those of fit_ols.
PriceRegression price_regression_cases(const PriceStudyInputs& inputs);

}  // namespace gridtrace::studies
