#include "gridtrace/studies/demand.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gridtrace/error.hpp"

namespace gridtrace::studies {

using frame::Cell;
using frame::Timestamp;

namespace {

using DailyPeaks = std::map<long, double>;

DailyPeaks daily_max(const std::vector<Timestamp>& ts, const std::vector<double>& values) {
  DailyPeaks out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const long d = frame::to_days(ts[i].date);
    auto [it, inserted] = out.emplace(d, values[i]);
    if (!inserted) it->second = std::max(it->second, values[i]);
  }
  return out;
}

DailyPeaks daily_max(const std::vector<Timestamp>& ts, const std::vector<Cell>& values) {
  std::vector<Timestamp> kept;
  std::vector<double> present;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (values[i]) {
      kept.push_back(ts[i]);
      present.push_back(*values[i]);
    }
  }
  return daily_max(kept, present);
}

DailyPeaks observed_peaks(const frame::WideFrame& demand, int year, unsigned month) {
  DailyPeaks out;
  for (std::size_t r = 0; r < demand.size(); ++r) {
    const Date& d = demand.dates()[r];
    if (frame::year_of(d) != year || frame::month_of(d) != month) continue;
    std::optional<double> peak;
    for (const Cell& c : demand.rows()[r]) {
      if (c) peak = peak ? std::max(*peak, *c) : *c;
    }
    if (peak) out.emplace(frame::to_days(d), *peak);
  }
  return out;
}

MonthlyReduction reduction(const DailyPeaks& observed, const DailyPeaks& base, int year, unsigned month) {
  MonthlyReduction m{year, month, 0.0, {}};
  for (const auto& [day, peak] : observed) {
    const auto it = base.find(day);
    if (it == base.end()) continue;
    const Date date = frame::from_days(day);
    if (it->second == 0.0) throw Error("zero-baseline", "baseline peak is zero on " + frame::format_date(date));
    const double r = (it->second - peak) / it->second * 100.0;
    m.days.push_back({date, it->second, peak, r});
    m.alpha += r;
  }
  if (m.days.empty()) {
    throw Error("empty-month", "no day of " + std::to_string(year) + "-" + std::to_string(month) +
                                   " has both a baseline and an observation");
  }
  m.alpha /= static_cast<double>(m.days.size());
  return m;
}

}  // namespace

MonthlyReduction peak_demand_reduction(const frame::WideFrame& demand, const baseline::BaselineSeries& baseline, int year,
                                       unsigned month) {
  return reduction(observed_peaks(demand, year, month), daily_max(baseline.timestamps, baseline.values), year, month);
}

std::vector<MonthlyReduction> peak_demand_report(const frame::WideFrame& demand, const baseline::BaselineSeries& baseline) {
  std::set<std::pair<int, unsigned>> months;
  for (const auto& d : demand.dates()) months.emplace(frame::year_of(d), frame::month_of(d));
  const DailyPeaks base = daily_max(baseline.timestamps, baseline.values);
  std::vector<MonthlyReduction> out;
  for (const auto& [y, m] : months) {
    try {
      out.push_back(reduction(observed_peaks(demand, y, m), base, y, m));
    } catch (const Error& e) {
      if (e.code() != "empty-month") throw;
    }
  }
  return out;
}

ProbabilisticReduction probabilistic_peak_reduction(const frame::WideFrame& demand,
                                                    const baseline::ProbabilisticBaseline& pb, int year, unsigned month) {
  const DailyPeaks observed = observed_peaks(demand, year, month);
  ProbabilisticReduction out{year, month, {}, 0.0, 0.0, false};
  for (std::size_t q = 0; q < 5; ++q) {
    out.alpha[q] = reduction(observed, daily_max(pb.timestamps, pb.tracks[q]), year, month).alpha;
  }
  out.width_50 = out.alpha[3] - out.alpha[1];
  out.width_80 = out.alpha[4] - out.alpha[0];
  const auto [lo, hi] = std::minmax_element(out.alpha.begin(), out.alpha.end());
  out.crosses_zero = *lo < 0.0 && *hi > 0.0;
  return out;
}

DuckCurveReport duck_curve(const frame::WideFrame& demand, const frame::WideFrame& solar, const Date& first,
                           const Date& last) {
  if (demand.meta().unit != solar.meta().unit) {
    throw Error("unit-mismatch", "demand in " + demand.meta().unit + ", solar in " + solar.meta().unit);
  }
  if (first > last) throw Error("bad-range", "period starts after it ends");
  std::array<double, 24> sum{};
  std::array<std::size_t, 24> count{};
  DuckCurveReport r;
  for (std::size_t i = 0; i < demand.size(); ++i) {
    const Date& d = demand.dates()[i];
    if (d < first || d > last) continue;
    bool used = false;
    for (int t = 0; t < 24; ++t) {
      const Cell load = demand.rows()[i][static_cast<std::size_t>(t)];
      const Cell sun = solar.at(d, t);
      if (!load || !sun) continue;
      sum[static_cast<std::size_t>(t)] += *load - *sun;
      ++count[static_cast<std::size_t>(t)];
      used = true;
    }
    r.days += used;
  }
  for (std::size_t t = 0; t < 24; ++t) {
    if (count[t] == 0) throw Error("no-overlap", "hour " + std::to_string(t) + " has no demand/solar pair");
    r.profile[t] = sum[t] / static_cast<double>(count[t]);
  }
  r.max_ramp = -INFINITY;
  for (std::size_t t = 1; t < 24; ++t) {
    const double step = r.profile[t] - r.profile[t - 1];
    if (step > r.max_ramp) {
      r.max_ramp = step;
      r.ramp_hour = static_cast<int>(t);
    }
  }
  const auto [lo, hi] = std::minmax_element(r.profile.begin(), r.profile.end());
  r.range = *hi - *lo;
  return r;
}

SeriesView renewable_share(const SeriesView& hydro, const SeriesView& solar, const SeriesView& wind) {
  if (hydro.timestamps() != solar.timestamps() || hydro.timestamps() != wind.timestamps()) {
    throw Error("misaligned", "share series cover different months");
  }
  std::vector<Cell> beta(hydro.size());
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const Cell parts[3] = {hydro.values()[i], solar.values()[i], wind.values()[i]};
    double total = 0.0;
    bool complete = true;
    for (const Cell& p : parts) {
      if (!p) {
        complete = false;
        continue;
      }
      if (*p < 0.0 || *p > 100.0) {
        throw Error("bad-share", "share outside [0, 100] at " + frame::format_timestamp(hydro.timestamps()[i]));
      }
      total += *p;
    }
    if (!complete) continue;
    if (total > 100.0 + 1e-9) {
      throw Error("share-overflow", "renewable share exceeds 100% at " + frame::format_timestamp(hydro.timestamps()[i]));
    }
    beta[i] = total;
  }
  return {hydro.timestamps(), std::move(beta)};
}

RenewableBaseline renewable_baseline(const SeriesView& share, const Date& study_start, learners::ArmaOrder order) {
  std::vector<double> history;
  RenewableBaseline out;
  out.baseline.method = "arma(" + order.describe() + ")";
  std::vector<double> observed;
  for (std::size_t i = 0; i < share.size(); ++i) {
    const auto& ts = share.timestamps()[i];
    const Cell& v = share.values()[i];
    if (ts.date < study_start) {
      if (!v) throw Error("missing-values", "share missing at " + frame::format_timestamp(ts));
      history.push_back(*v);
    } else {
      out.baseline.timestamps.push_back(ts);
      if (v) observed.push_back(*v);
    }
  }
  if (out.baseline.timestamps.empty()) throw Error("bad-range", "no months on or after the study start");
  out.model = learners::fit_arma_css(history, order);
  if (out.model.low_sample) out.baseline.meta.notes.push_back("fewer than 10 observations per parameter");
  const auto f = out.model.forecast(static_cast<int>(out.baseline.timestamps.size()));
  out.baseline.values.assign(f.begin(), f.end());
  for (double v : f) out.baseline_mean += v / static_cast<double>(f.size());
  for (double v : observed) out.observed_mean += v / static_cast<double>(observed.size());
  return out;
}

}  // namespace gridtrace::studies
