#include "gridtrace/baseline/backcast.hpp"

#include <cmath>
#include <numbers>

#include "gridtrace/error.hpp"

namespace gridtrace::baseline {

void FeatureSet::validate() const {
  if (static_cast<Eigen::Index>(timestamps.size()) != x.rows()) {
    throw Error("misaligned", "feature rows and timestamps differ in count");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (!(timestamps[i - 1] < timestamps[i])) throw Error("unordered", "feature timestamps must increase");
  }
}

std::vector<Eigen::Index> FeatureSet::rows_between(const Date& first, const Date& last) const {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    if (timestamps[i].date >= first && timestamps[i].date <= last) rows.push_back(static_cast<Eigen::Index>(i));
  }
  return rows;
}

FeatureSet build_features(const std::vector<Timestamp>& timestamps, const std::vector<NamedSeries>& covariates,
                          const SeriesView* lag_source, const FeatureOptions& opt) {
  std::vector<std::string> names;
  if (opt.hour_of_day) names.insert(names.end(), {"hour_sin", "hour_cos"});
  if (opt.day_of_year) names.insert(names.end(), {"doy_sin", "doy_cos"});
  static const char* kDays[] = {"mon", "tue", "wed", "thu", "fri", "sat"};
  if (opt.weekday) names.insert(names.end(), std::begin(kDays), std::end(kDays));
  for (const auto& c : covariates) names.push_back(c.name);
  const bool lag = opt.week_aligned_lag && lag_source;
  if (lag) names.push_back("lag_364d");

  constexpr double tau = 2.0 * std::numbers::pi;
  std::vector<Timestamp> kept;
  std::vector<std::vector<double>> rows;
  for (const auto& ts : timestamps) {
    std::vector<double> row;
    if (opt.hour_of_day) {
      row.push_back(std::sin(tau * ts.hour / 24.0));
      row.push_back(std::cos(tau * ts.hour / 24.0));
    }
    if (opt.day_of_year) {
      const Date jan1{ts.date.year(), std::chrono::January, std::chrono::day{1}};
      const double doy = static_cast<double>(frame::to_days(ts.date) - frame::to_days(jan1));
      const double len = frame::is_leap_year(frame::year_of(ts.date)) ? 366.0 : 365.0;
      row.push_back(std::sin(tau * doy / len));
      row.push_back(std::cos(tau * doy / len));
    }
    if (opt.weekday) {
      const unsigned wd = frame::weekday_index(ts.date);
      for (unsigned d = 1; d <= 6; ++d) row.push_back(wd == d ? 1.0 : 0.0);
    }
    bool complete = true;
    for (const auto& c : covariates) {
      const Cell v = c.series.at(ts);
      if (!v) {
        complete = false;
        break;
      }
      row.push_back(*v);
    }
    if (complete && lag) {
      const Cell v = lag_source->at({frame::align_week(ts.date, 1), ts.hour});
      if (v) {
        row.push_back(*v);
      } else {
        complete = false;
      }
    }
    if (!complete) continue;
    kept.push_back(ts);
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < names.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return {std::move(kept), learners::FeatureMatrix(std::move(names), std::move(m))};
}

namespace {

const std::vector<std::string>& names_of(const learners::FittedModel& m) {
  if (const auto* r = std::get_if<learners::RidgeModel>(&m)) return r->feature_names;
  if (const auto* n = std::get_if<learners::MlpModel>(&m)) return n->feature_names;
  throw Error("bad-spec", "ensemble members must be feature models (ridge or MLP)");
}

}  // namespace

Ensemble::Ensemble(std::vector<learners::FittedModel> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error("empty-ensemble", "ensemble needs at least one member");
  names_ = names_of(members_.front());
  for (const auto& m : members_) {
    if (names_of(m) != names_) throw Error("bad-features", "ensemble members disagree on feature schema");
  }
}

Eigen::VectorXd Ensemble::predict(const Eigen::MatrixXd& x) const {
  if (members_.empty()) throw Error("not-fitted", "ensemble has no fitted members");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.rows());
  for (const auto& m : members_) sum += learners::predict(m, x);
  return sum / static_cast<double>(members_.size());
}

Ensemble ensemble_average(std::vector<learners::FittedModel> models) { return Ensemble(std::move(models)); }

Ensemble fit_ensemble(const EnsembleSpec& spec, const learners::FeatureMatrix& x, std::span<const double> y) {
  if (spec.empty()) throw Error("empty-ensemble", "ensemble spec lists no base learners");
  std::vector<learners::FittedModel> members;
  for (const auto& s : spec) {
    if (s.is_arma()) throw Error("bad-spec", "backcast members must be ridge or MLP learners");
    members.push_back(learners::fit(s, x, y));
  }
  return Ensemble(std::move(members));
}

BaselineSeries backcast(const FeatureSet& features, const SeriesView& target, const EnsembleSpec& spec,
                        const BackcastWindow& window) {
  features.validate();
  if (window.horizon_first > window.horizon_last) throw Error("bad-range", "horizon start after its end");
  std::vector<Eigen::Index> train;
  std::vector<double> y;
  for (std::size_t i = 0; i < features.timestamps.size(); ++i) {
    const auto& ts = features.timestamps[i];
    if (ts.date >= window.event_start) continue;
    const Cell v = target.at(ts);
    if (!v) continue;
    train.push_back(static_cast<Eigen::Index>(i));
    y.push_back(*v);
  }
  if (train.empty()) {
    if (target.empty() || features.timestamps.empty()) throw Error("misaligned", "no feature rows align with the target");
    throw Error("short-series", "no pre-event training rows with a present target");
  }
  const Ensemble model = fit_ensemble(spec, features.x.select_rows(train), y);
  const auto horizon = features.rows_between(window.horizon_first, window.horizon_last);
  const Eigen::VectorXd pred = model.predict(features.x.select_rows(horizon).values());

  BaselineSeries b;
  b.method = "backcast";
  for (std::size_t i = 0; i < horizon.size(); ++i) {
    b.timestamps.push_back(features.timestamps[static_cast<std::size_t>(horizon[i])]);
    b.values.emplace_back(pred[static_cast<Eigen::Index>(i)]);
  }
  for (int yr = frame::year_of(features.timestamps[static_cast<std::size_t>(train.front())].date);
       yr <= frame::year_of(features.timestamps[static_cast<std::size_t>(train.back())].date); ++yr) {
    b.meta.source_years.push_back(yr);
  }
  b.meta.notes.push_back("trained on " + std::to_string(train.size()) + " pre-event rows with " +
                         std::to_string(spec.size()) + " base learner(s)");
  return b;
}

}  // namespace gridtrace::baseline
