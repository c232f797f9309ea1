#include "gridtrace/studies/price.hpp"

#include <cmath>
#include <map>

#include "gridtrace/error.hpp"

namespace gridtrace::studies {

using frame::Cell;

Bucket parse_bucket(const std::string& text) {
  if (text == "weekly") return Bucket::weekly;
  if (text == "monthly") return Bucket::monthly;
  throw Error("bad-spec", "bucket must be weekly or monthly, got '" + text + "'");
}

std::string to_string(Bucket b) { return b == Bucket::weekly ? "weekly" : "monthly"; }

ExtremeCounts count_extremes(const SeriesView& index, double threshold, Bucket bucket) {
  ExtremeCounts out;
  out.bucket = bucket;
  out.threshold = threshold;
  if (index.empty()) return out;
  const Date first = index.timestamps().front().date;
  const long anchor = frame::to_days(first) - static_cast<long>((frame::weekday_index(first) + 6) % 7);
  std::map<long, BucketCount> buckets;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Cell& v = index.values()[i];
    if (!v) continue;
    const Date& d = index.timestamps()[i].date;
    Date start;
    if (bucket == Bucket::weekly) {
      start = frame::from_days(anchor + (frame::to_days(d) - anchor) / 7 * 7);
    } else {
      start = frame::make_date(frame::year_of(d), frame::month_of(d), 1);
    }
    auto& b = buckets.try_emplace(frame::to_days(start), BucketCount{start, 0, 0}).first->second;
    ++b.indexed;
    ++out.indexed;
    if (*v >= threshold) {
      ++b.flagged;
      ++out.flagged;
    }
  }
  for (auto& [day, b] : buckets) out.buckets.push_back(b);
  return out;
}

ExtremeCounts extreme_price_count(const SeriesView& price, const baseline::WindowSpec& window, double threshold,
                                  Bucket bucket) {
  return count_extremes(baseline::fluctuation_index(price, window).index, threshold, bucket);
}

std::string to_string(LoiBand band) {
  switch (band) {
    case LoiBand::unusual: return "unusual";
    case LoiBand::highly_unusual: return "highly-unusual";
    default: return "normal";
  }
}

LoiBand classify_loi(double value) {
  if (value > 3.0) return LoiBand::highly_unusual;
  if (value >= 0.75) return LoiBand::unusual;
  return LoiBand::normal;
}

LoiSeries loi(const SeriesView& index, std::size_t window_samples) {
  if (window_samples < 1) throw Error("bad-window", "window size must be positive");
  const double n = static_cast<double>(window_samples);
  const double lo = 1.0 / (n + 1.0), hi = n / (n + 1.0);
  LoiSeries out;
  std::vector<Cell> values(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Cell& v = index.values()[i];
    if (!v) continue;
    if (*v < 0.0 || *v > 1.0) {
      throw Error("bad-index", "index outside [0, 1] at " + frame::format_timestamp(index.timestamps()[i]));
    }
    double x = *v;
    if (x < lo || x > hi) {
      x = std::clamp(x, lo, hi);
      out.clamped.push_back(index.timestamps()[i]);
    }
    values[i] = std::log(x / (1.0 - x));
    out.bands.push_back(classify_loi(*values[i]));
  }
  out.values = SeriesView(index.timestamps(), std::move(values));
  return out;
}

SeriesView daily_index(const baseline::FluctuationSeries& index) {
  return frame::aggregate(index.index, frame::AggregationLevel::daily).series;
}

SeriesView pandemic_dummy(const std::vector<Timestamp>& timestamps, const Date& event) {
  std::vector<Cell> v;
  for (const auto& ts : timestamps) v.emplace_back(ts.date >= event ? 1.0 : 0.0);
  return {timestamps, std::move(v)};
}

namespace {

PriceRegression run(const PriceStudyInputs& in, const std::string& formula, const std::string& second,
                    const SeriesView& second_series) {
  std::vector<double> y, gas, other;
  PriceRegression out;
  for (std::size_t i = 0; i < in.response.size(); ++i) {
    const auto& ts = in.response.timestamps()[i];
    const Cell r = in.response.values()[i], g = in.gas.at(ts), o = second_series.at(ts);
    if (!r || !g || !o) {
      ++out.dropped_rows;
      continue;
    }
    y.push_back(*r);
    gas.push_back(*g);
    other.push_back(*o);
  }
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd m(n, 3);
  m.col(0) = learners::as_vector(y);
  m.col(1) = learners::as_vector(gas);
  m.col(2) = learners::as_vector(other);
  out.ols = regress::fit_ols(regress::OLSSpec::parse(formula), learners::FeatureMatrix({"loi", "gas", second}, m));
  for (const auto& c : out.ols.coefficients) out.significant.push_back(c.p_value < 0.05);
  return out;
}

}  // namespace

PriceRegression price_regression_dummy(const PriceStudyInputs& inputs) {
  for (std::size_t i = 0; i < inputs.pandemic.size(); ++i) {
    const Cell& v = inputs.pandemic.values()[i];
    if (v && *v != 0.0 && *v != 1.0) {
      throw Error("bad-dummy", "pandemic indicator is not 0/1 at " + frame::format_timestamp(inputs.pandemic.timestamps()[i]));
    }
  }
  return run(inputs, "loi ~ gas:pandemic + gas + pandemic + 1", "pandemic", inputs.pandemic);
}

PriceRegression price_regression_cases(const PriceStudyInputs& inputs) {
  for (std::size_t i = 0; i < inputs.cases.size(); ++i) {
    const Cell& v = inputs.cases.values()[i];
    if (v && *v < 0.0) {
      throw Error("negative-cases", "negative case count at " + frame::format_timestamp(inputs.cases.timestamps()[i]));
    }
  }
  return run(inputs, "loi ~ gas + cases + gas:cases + 1", "cases", inputs.cases);
}

}  // namespace gridtrace::studies
