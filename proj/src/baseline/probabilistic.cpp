#include "gridtrace/baseline/probabilistic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridtrace/error.hpp"
#include "gridtrace/frame/csv.hpp"

namespace gridtrace::baseline {

std::string to_string(ProbabilisticFamily f) { return f == ProbabilisticFamily::trend ? "trend" : "backcast"; }

ProbabilisticFamily parse_family(const std::string& text) {
  if (text == "trend") return ProbabilisticFamily::trend;
  if (text == "backcast") return ProbabilisticFamily::backcast;
  throw Error("bad-spec", "family must be 'trend' or 'backcast', got '" + text + "'");
}

const std::vector<double>& ProbabilisticBaseline::track(double q) const {
  for (std::size_t i = 0; i < kQuantileLevels.size(); ++i) {
    if (std::abs(kQuantileLevels[i] - q) < 1e-12) return tracks[i];
  }
  throw Error("bad-quantile", "levels are 0.10, 0.25, 0.50, 0.75 and 0.90");
}

BaselineSeries ProbabilisticBaseline::median() const {
  BaselineSeries b;
  b.method = "probabilistic-" + to_string(family) + "-q50";
  b.timestamps = timestamps;
  for (double v : tracks[2]) b.values.emplace_back(v);
  return b;
}

FeatureSet trend_features(const std::vector<Timestamp>& timestamps, const Timestamp& origin, int harmonics) {
  if (harmonics < 0) throw Error("bad-spec", "harmonics must be >= 0");
  std::vector<std::string> names{"elapsed_years"};
  for (int k = 1; k <= harmonics; ++k) {
    for (const char* p : {"day", "year"}) {
      names.push_back(std::string(p) + "_sin" + std::to_string(k));
      names.push_back(std::string(p) + "_cos" + std::to_string(k));
    }
  }
  constexpr double tau = 2.0 * std::numbers::pi;
  const long t0 = frame::to_hours(origin);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(timestamps.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const double hours = static_cast<double>(frame::to_hours(timestamps[i]) - t0);
    const double years = hours / (24.0 * 365.2425);
    const auto r = static_cast<Eigen::Index>(i);
    m(r, 0) = years;
    Eigen::Index c = 1;
    for (int k = 1; k <= harmonics; ++k) {
      m(r, c++) = std::sin(tau * k * hours / 24.0);
      m(r, c++) = std::cos(tau * k * hours / 24.0);
      m(r, c++) = std::sin(tau * k * years);
      m(r, c++) = std::cos(tau * k * years);
    }
  }
  return {timestamps, learners::FeatureMatrix(std::move(names), std::move(m))};
}

ProbabilisticBaseline probabilistic_baseline(const FeatureSet& features, const SeriesView& target,
                                             const ProbabilisticSpec& spec, const BackcastWindow& window) {
  if (spec.base.is_arma()) throw Error("bad-spec", "probabilistic base learner must be ridge or MLP");
  ProbabilisticBaseline pb;
  pb.family = spec.family;
  std::array<std::vector<double>, 5> raw;
  for (std::size_t i = 0; i < kQuantileLevels.size(); ++i) {
    learners::LearnerSpec s = spec.base;
    s.loss = learners::LossKind::pinball(kQuantileLevels[i]);
    const BaselineSeries b = backcast(features, target, {s}, window);
    if (i == 0) pb.timestamps = b.timestamps;
    for (const auto& v : b.values) raw[i].push_back(*v);
  }
  for (auto& t : pb.tracks) t.resize(pb.timestamps.size());
  for (std::size_t t = 0; t < pb.timestamps.size(); ++t) {
    std::array<double, 5> v{};
    for (std::size_t i = 0; i < 5; ++i) v[i] = raw[i][t];
    if (!std::is_sorted(v.begin(), v.end())) {
      std::sort(v.begin(), v.end());
      ++pb.rearranged;
    }
    for (std::size_t i = 0; i < 5; ++i) pb.tracks[i][t] = v[i];
  }
  return pb;
}

std::pair<std::vector<double>, std::vector<double>> confidence_interval(const ProbabilisticBaseline& pb, int level) {
  if (level == 50) return {pb.tracks[1], pb.tracks[3]};
  if (level == 80) return {pb.tracks[0], pb.tracks[4]};
  throw Error("unsupported-level", "confidence level must be 50 or 80, got " + std::to_string(level));
}

namespace {

std::string cell(const Cell& c) { return c ? frame::format_number(*c) : ""; }

}  // namespace

void write_baseline_csv(std::ostream& out, const SeriesView& observed, const BaselineSeries& baseline) {
  out << "timestamp,observed,baseline\n";
  for (std::size_t i = 0; i < baseline.timestamps.size(); ++i) {
    const auto& ts = baseline.timestamps[i];
    out << frame::format_timestamp(ts) << ',' << cell(observed.at(ts)) << ',' << cell(baseline.values[i]) << '\n';
  }
}

void write_baseline_csv(std::ostream& out, const SeriesView& observed, const ProbabilisticBaseline& pb) {
  out << "timestamp,observed,baseline,q10,q25,q50,q75,q90\n";
  for (std::size_t i = 0; i < pb.timestamps.size(); ++i) {
    const auto& ts = pb.timestamps[i];
    out << frame::format_timestamp(ts) << ',' << cell(observed.at(ts)) << ',' << frame::format_number(pb.tracks[2][i]);
    for (const auto& t : pb.tracks) out << ',' << frame::format_number(t[i]);
    out << '\n';
  }
}

}  // namespace gridtrace::baseline
