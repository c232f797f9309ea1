#include "gridtrace/baseline/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gridtrace/error.hpp"
#include "gridtrace/frame/csv.hpp"

namespace gridtrace::baseline {

double distribution_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error("empty-window", "both samples must be non-empty");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < x.size() || j < y.size()) {
    // step past every copy of the next support point in both samples
    const double v = j >= y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

double midrank_cdf(std::span<const double> w, double x) {
  const auto lo = std::lower_bound(w.begin(), w.end(), x);
  const auto hi = std::upper_bound(lo, w.end(), x);
  const double below = static_cast<double>(lo - w.begin());
  const double equal = static_cast<double>(hi - lo);
  return (below + 0.5 * equal + 0.5) / (static_cast<double>(w.size()) + 1.0);
}

double fluctuation_value(std::span<const double> w, double x) { return std::abs(1.0 - 2.0 * midrank_cdf(w, x)); }

std::string WindowSpec::describe() const { return kind == Kind::calendar_month ? "month" : std::to_string(hours) + "h"; }

WindowSpec WindowSpec::parse(const std::string& text) {
  if (text == "month") return month();
  std::string digits = text;
  if (!digits.empty() && digits.back() == 'h') digits.pop_back();
  const auto v = frame::parse_number(digits);
  if (!v || *v < 1 || *v != std::floor(*v)) throw Error("bad-window", "window must be 'month' or an hour count, got '" + text + "'");
  return trailing(static_cast<int>(*v));
}

namespace {

void insert_sorted(std::vector<double>& w, double v) { w.insert(std::upper_bound(w.begin(), w.end(), v), v); }
void erase_sorted(std::vector<double>& w, double v) { w.erase(std::lower_bound(w.begin(), w.end(), v)); }

}  // namespace

FluctuationSeries fluctuation_index(const SeriesView& series, const WindowSpec& window) {
  const auto& ts = series.timestamps();
  const auto& v = series.values();
  std::vector<Cell> out(v.size());

  if (window.kind == WindowSpec::Kind::trailing) {
    if (window.hours < static_cast<int>(kMinWindowSamples)) {
      throw Error("small-window", "trailing window of " + std::to_string(window.hours) + " hours is below 30 samples");
    }
    std::vector<double> sorted;
    std::size_t tail = 0;  // first index still inside the window
    for (std::size_t i = 0; i < v.size(); ++i) {
      const long now = frame::to_hours(ts[i]);
      while (tail < i && frame::to_hours(ts[tail]) < now - window.hours) {
        if (v[tail]) erase_sorted(sorted, *v[tail]);
        ++tail;
      }
      if (v[i] && sorted.size() >= kMinWindowSamples) out[i] = fluctuation_value(sorted, *v[i]);
      if (v[i]) insert_sorted(sorted, *v[i]);
    }
  } else {
    std::map<std::pair<int, unsigned>, std::vector<double>> months;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i]) months[{frame::year_of(ts[i].date), frame::month_of(ts[i].date)}].push_back(*v[i]);
    }
    for (auto& [key, sample] : months) std::sort(sample.begin(), sample.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i]) continue;
      const auto& all = months[{frame::year_of(ts[i].date), frame::month_of(ts[i].date)}];
      if (all.size() < kMinWindowSamples + 1) continue;
      // the window excludes x itself: one copy of x sits among the equal values
      const auto lo = std::lower_bound(all.begin(), all.end(), *v[i]);
      const auto hi = std::upper_bound(lo, all.end(), *v[i]);
      const double below = static_cast<double>(lo - all.begin());
      const double equal = static_cast<double>(hi - lo) - 1.0;
      const double f = (below + 0.5 * equal + 0.5) / static_cast<double>(all.size());
      out[i] = std::abs(1.0 - 2.0 * f);
    }
  }
  return {window, SeriesView(ts, std::move(out))};
}

BaselineSeries index_baseline(const FluctuationSeries& idx, int years_back, frame::AggregationLevel level) {
  if (level == frame::AggregationLevel::hourly) return shift_years(idx.index, years_back, "index-hourly");
  const auto agg = frame::aggregate(idx.index, level);
  return shift_years(agg.series, years_back, "index-" + frame::to_string(level));
}

}  // namespace gridtrace::baseline
