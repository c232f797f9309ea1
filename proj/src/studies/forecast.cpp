#include "gridtrace/studies/forecast.hpp"

#include <cmath>

#include "gridtrace/error.hpp"
#include "gridtrace/regress/ols.hpp"

namespace gridtrace::studies {

using frame::Cell;

double mape(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw Error("misaligned", "actual and predicted differ in length");
  if (actual.empty()) throw Error("empty-window", "no values to score");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) throw Error("zero-actual", "actual value is zero at position " + std::to_string(i));
    sum += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
  }
  return sum / static_cast<double>(actual.size()) * 100.0;
}

double mape(const SeriesView& actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw Error("misaligned", "actual and predicted differ in length");
  std::vector<double> a, p;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const Cell& v = actual.values()[i];
    if (!v) continue;
    if (*v == 0.0) throw Error("zero-actual", "actual value is zero at " + frame::format_timestamp(actual.timestamps()[i]));
    a.push_back(*v);
    p.push_back(predicted[i]);
  }
  return mape(a, p);
}

const ModelScore& ForecastEnhancementReport::score(const std::string& model) const {
  for (const auto& s : scores) {
    if (s.model == model) return s;
  }
  throw Error("bad-spec", "no model named '" + model + "'");
}

namespace {

bool inside(const Date& d, const DateWindow& w) { return d >= w.first && d <= w.last; }

struct Rows {
  std::vector<Eigen::Index> index;
  std::vector<double> y;
};

template <typename Keep>
Rows select(const baseline::FeatureSet& fs, const std::vector<Cell>& y, Keep keep) {
  Rows r;
  for (std::size_t i = 0; i < fs.timestamps.size(); ++i) {
    if (y[i] && keep(fs.timestamps[i].date)) {
      r.index.push_back(static_cast<Eigen::Index>(i));
      r.y.push_back(*y[i]);
    }
  }
  return r;
}

double window_mape(const Rows& rows, const Eigen::VectorXd& pred) {
  std::vector<double> p;
  for (auto i : rows.index) p.push_back(pred(i));
  return mape(rows.y, p);
}

}  // namespace

ForecastEnhancementReport mobility_enhanced_forecast(const EnhancementInputs& in) {
  const auto& fs = in.features;
  fs.validate();
  std::vector<Cell> y;
  for (const auto& ts : fs.timestamps) y.push_back(in.demand.at(ts));

  const Rows train = select(fs, y, [&](const Date& d) { return d < in.event; });
  if (train.index.empty()) throw Error("short-series", "no observations before the event");
  const Rows calib = select(fs, y, [&](const Date& d) { return inside(d, in.calibration); });
  if (calib.index.empty()) throw Error("no-calibration-data", "calibration window holds no observations");
  const Rows normal = select(fs, y, [&](const Date& d) { return inside(d, in.normal); });
  const Rows lockdown = select(fs, y, [&](const Date& d) { return inside(d, in.lockdown); });
  if (lockdown.index.empty()) throw Error("empty-window", "lockdown window holds no observations");

  const auto base = learners::fit(in.base, fs.x.select_rows(train.index), train.y);
  const Eigen::VectorXd pred = learners::predict(base, fs.x.values());

  ForecastEnhancementReport report;
  ModelScore b{"base", std::nullopt, window_mape(lockdown, pred), 0.0, {}};
  if (!normal.index.empty()) b.normal_mape = window_mape(normal, pred);
  report.scores.push_back(b);

  Rows refit = train;
  for (std::size_t k = 0; k < calib.index.size(); ++k) {
    if (fs.timestamps[static_cast<std::size_t>(calib.index[k])].date >= in.event) {
      refit.index.push_back(calib.index[k]);
      refit.y.push_back(calib.y[k]);
    }
  }
  const auto updated = learners::fit(in.base, fs.x.select_rows(refit.index), refit.y);
  const double updated_mape = window_mape(lockdown, learners::predict(updated, fs.x.values()));
  report.scores.push_back({"updated", std::nullopt, updated_mape, b.lockdown_mape - updated_mape, {}});

  for (const auto& e : in.enhancers) {
    std::vector<Cell> lagged;
    for (const auto& ts : fs.timestamps) lagged.push_back(e.series.at({frame::add_days(ts.date, -1), 0}));
    std::vector<double> m, r;
    for (std::size_t k = 0; k < calib.index.size(); ++k) {
      const Cell& v = lagged[static_cast<std::size_t>(calib.index[k])];
      if (!v) continue;
      m.push_back(*v);
      r.push_back(calib.y[k] - pred(calib.index[k]));
    }
    if (m.empty()) throw Error("no-calibration-data", "no calibration rows with a previous-day '" + e.name + "' value");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(m.size()), 2);
    x.col(0).setOnes();
    x.col(1) = learners::as_vector(m);
    const auto fit = regress::fit_ols(x, learners::as_vector(r), {"intercept", e.name + "_lag1"}, true);
    const Eigen::VectorXd c = fit.estimates();
    Eigen::VectorXd enhanced = pred;
    for (Eigen::Index i = 0; i < enhanced.size(); ++i) {
      if (const Cell& v = lagged[static_cast<std::size_t>(i)]) enhanced(i) += c(0) + c(1) * *v;
    }
    const double score = window_mape(lockdown, enhanced);
    report.scores.push_back({"base+" + e.name, std::nullopt, score, b.lockdown_mape - score, {c(0), c(1)}});
  }
  return report;
}

}  // namespace gridtrace::studies
