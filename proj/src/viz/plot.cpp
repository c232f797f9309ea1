#include "gridtrace/viz/plot.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gridtrace/error.hpp"
#include "gridtrace/frame/correlation.hpp"

namespace gridtrace::viz {

using frame::Cell;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<PlotKind, const char*>, 7> kKindNames{{
    {PlotKind::line, "line"},
    {PlotKind::scatter, "scatter"},
    {PlotKind::stacked_bar, "stacked-bar"},
    {PlotKind::histogram, "histogram"},
    {PlotKind::cdf, "cdf"},
    {PlotKind::boxplot, "boxplot"},
    {PlotKind::heatmap, "heatmap"},
}};

std::vector<Cell> cells(std::span<const double> v) { return {v.begin(), v.end()}; }

}  // namespace

std::string to_string(PlotKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "line";
}

PlotKind parse_plot_kind(const std::string& text) {
  for (const auto& [k, name] : kKindNames) {
    if (text == name) return k;
  }
  throw Error("bad-spec", "unknown plot kind '" + text + "'");
}

void PlotData::validate() const {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error("bad-plot", "non-finite x value");
  }
  if (!x_labels.empty() && x_labels.size() != x.size()) throw Error("bad-plot", "x labels do not match x");
  for (const auto& s : series) {
    if (s.y.size() != x.size()) throw Error("bad-plot", "series '" + s.name + "' does not match x");
    for (const auto& v : s.y) {
      if (v && !std::isfinite(*v)) throw Error("bad-plot", "non-finite value in '" + s.name + "'");
    }
  }
}

double empirical_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("empty-sample", "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

PlotData build_stacked_bar(std::span<const Trace> categories, const frame::SeriesView& total) {
  PlotData p;
  p.kind = PlotKind::stacked_bar;
  p.y_label = "share (%)";
  for (const auto& c : categories) p.series.push_back({c.name, {}});
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < total.size(); ++i) {
    const auto& ts = total.timestamps()[i];
    const Cell& t = total.values()[i];
    std::vector<double> parts;
    for (const auto& c : categories) {
      if (const Cell v = c.series.at(ts)) parts.push_back(*v);
    }
    if (!t || parts.size() != categories.size()) {
      ++skipped;
      continue;
    }
    const std::string bar = frame::format_timestamp(ts);
    if (*t <= 0.0) throw Error("zero-total", "bar " + bar + " has a non-positive total");
    double sum = 0.0;
    for (double v : parts) sum += v;
    if (std::abs(sum - *t) > 1e-6 * std::abs(*t)) {
      throw Error("inconsistent-total", "categories of bar " + bar + " do not add up to the total");
    }
    p.x.push_back(static_cast<double>(p.x_labels.size()));
    p.x_labels.push_back(bar);
    for (std::size_t k = 0; k < parts.size(); ++k) p.series[k].y.push_back(parts[k] / sum * 100.0);
  }
  p.meta["skipped_bars"] = skipped;
  return p;
}

PlotData build_boxplot(std::span<const BoxColumn> columns) {
  PlotData p;
  p.kind = PlotKind::boxplot;
  p.x.assign(kBoxLevels.begin(), kBoxLevels.end());
  p.x_label = "quantile level";
  for (const auto& c : columns) {
    if (c.values.size() < 5) throw Error("short-column", "column '" + c.name + "' has fewer than 5 values");
    std::vector<double> sorted(c.values);
    std::sort(sorted.begin(), sorted.end());
    PlotSeries s{c.name, {}};
    for (double q : kBoxLevels) s.y.emplace_back(empirical_quantile(sorted, q));
    p.series.push_back(std::move(s));
  }
  return p;
}

PlotData build_histogram(std::span<const double> sample, int bins) {
  if (sample.empty()) throw Error("empty-sample", "histogram of an empty sample");
  if (bins < 1) throw Error("bad-spec", "histogram needs at least one bin");
  auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
  double lo = *mn, hi = *mx;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const auto nb = static_cast<std::size_t>(bins);
  const double width = (hi - lo) / static_cast<double>(nb);
  std::vector<double> edges(nb + 1);
  for (std::size_t i = 0; i < nb; ++i) edges[i] = lo + static_cast<double>(i) * width;
  edges[nb] = hi;
  std::vector<std::size_t> counts(nb, 0);
  for (double v : sample) {
    auto b = static_cast<std::size_t>(std::lower_bound(edges.begin() + 1, edges.end(), v) - (edges.begin() + 1));
    ++counts[std::min(b, nb - 1)];
  }
  PlotData p;
  p.kind = PlotKind::histogram;
  p.y_label = "density";
  PlotSeries density{"density", {}}, mass{"mass", {}};
  const auto n = static_cast<double>(sample.size());
  for (std::size_t i = 0; i < nb; ++i) {
    p.x.push_back(0.5 * (edges[i] + edges[i + 1]));
    const double m = static_cast<double>(counts[i]) / n;
    mass.y.emplace_back(m);
    density.y.emplace_back(m / (edges[i + 1] - edges[i]));
  }
  p.series = {std::move(density), std::move(mass)};
  p.meta["edges"] = edges;
  return p;
}

PlotData build_cdf(std::span<const double> sample) {
  if (sample.empty()) throw Error("empty-sample", "CDF of an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  PlotData p;
  p.kind = PlotKind::cdf;
  p.y_label = "cumulative probability";
  PlotSeries f{"cdf", {}};
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    p.x.push_back(sorted[i]);
    f.y.emplace_back(static_cast<double>(i + 1) / n);
  }
  p.series.push_back(std::move(f));
  return p;
}

PlotData build_heatmap(std::span<const Trace> traces) {
  std::vector<frame::SeriesView> views;
  for (const auto& t : traces) views.push_back(t.series);
  const Eigen::MatrixXd r = frame::pearson_matrix(views);
  PlotData p;
  p.kind = PlotKind::heatmap;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    p.x.push_back(static_cast<double>(i));
    p.x_labels.push_back(traces[i].name);
  }
  for (std::size_t i = 0; i < traces.size(); ++i) {
    PlotSeries row{traces[i].name, {}};
    for (std::size_t j = 0; j < traces.size(); ++j) row.y.emplace_back(r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    p.series.push_back(std::move(row));
  }
  return p;
}

PlotData build_line(std::span<const Trace> traces, std::vector<EventMarker> events) {
  PlotData p;
  p.kind = PlotKind::line;
  p.events = std::move(events);
  std::map<long, std::size_t> slot;
  for (const auto& t : traces) {
    for (const auto& ts : t.series.timestamps()) slot.emplace(frame::to_hours(ts), 0);
  }
  const long origin = slot.empty() ? 0 : slot.begin()->first;
  for (auto& [hours, index] : slot) {
    index = p.x.size();
    p.x.push_back(static_cast<double>(hours - origin));
    p.x_labels.push_back(frame::format_timestamp(frame::from_hours(hours)));
  }
  for (const auto& t : traces) {
    PlotSeries s{t.name, std::vector<Cell>(p.x.size())};
    for (std::size_t i = 0; i < t.series.size(); ++i) {
      s.y[slot.at(frame::to_hours(t.series.timestamps()[i]))] = t.series.values()[i];
    }
    p.series.push_back(std::move(s));
  }
  if (!slot.empty()) p.meta["x_origin"] = frame::format_timestamp(frame::from_hours(origin));
  p.x_label = "hours since start";
  return p;
}

PlotData build_scatter(std::span<const double> x, std::span<const double> y, const std::string& name) {
  if (x.size() != y.size()) throw Error("misaligned", "scatter samples differ in length");
  PlotData p;
  p.kind = PlotKind::scatter;
  p.x.assign(x.begin(), x.end());
  p.series.push_back({name, cells(y)});
  return p;
}

ordered_json to_json(const PlotData& plot) {
  plot.validate();
  ordered_json j;
  j["kind"] = to_string(plot.kind);
  j["x"] = plot.x;
  j["series"] = ordered_json::array();
  for (const auto& s : plot.series) {
    ordered_json y = ordered_json::array();
    for (const auto& v : s.y) y.push_back(v ? ordered_json(*v) : ordered_json(nullptr));
    j["series"].push_back({{"name", s.name}, {"y", std::move(y)}});
  }
  j["events"] = ordered_json::array();
  for (const auto& e : plot.events) j["events"].push_back({{"date", frame::format_date(e.date)}, {"label", e.label}});
  ordered_json meta = ordered_json::object();
  if (!plot.title.empty()) meta["title"] = plot.title;
  if (!plot.x_label.empty()) meta["x_label"] = plot.x_label;
  if (!plot.y_label.empty()) meta["y_label"] = plot.y_label;
  if (!plot.x_labels.empty()) meta["x_labels"] = plot.x_labels;
  for (const auto& [k, v] : plot.meta.items()) meta[k] = v;
  j["meta"] = std::move(meta);
  return j;
}

PlotData plot_from_json(const ordered_json& j) {
  try {
    PlotData p;
    p.kind = parse_plot_kind(j.at("kind").get<std::string>());
    p.x = j.at("x").get<std::vector<double>>();
    for (const auto& s : j.at("series")) {
      PlotSeries ps{s.at("name").get<std::string>(), {}};
      for (const auto& v : s.at("y")) ps.y.push_back(v.is_null() ? Cell{} : Cell{v.get<double>()});
      p.series.push_back(std::move(ps));
    }
    for (const auto& e : j.value("events", ordered_json::array())) {
      p.events.push_back({frame::parse_date(e.at("date").get<std::string>()), e.value("label", "")});
    }
    const ordered_json meta = j.value("meta", ordered_json::object());
    for (const auto& [k, v] : meta.items()) {
      if (k == "title") p.title = v.get<std::string>();
      else if (k == "x_label") p.x_label = v.get<std::string>();
      else if (k == "y_label") p.y_label = v.get<std::string>();
      else if (k == "x_labels") p.x_labels = v.get<std::vector<std::string>>();
      else p.meta[k] = v;
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad-plot", e.what());
  }
}

}  // namespace gridtrace::viz
