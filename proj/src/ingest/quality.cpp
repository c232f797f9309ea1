#include "gridtrace/ingest/quality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "gridtrace/error.hpp"
#include "gridtrace/frame/csv.hpp"

namespace gridtrace::ingest {

using frame::HourRow;
using frame::kHoursPerDay;

void QualityRule::validate() const {
  if (max_gap_hours < 1) throw Error("bad-rule", "max gap must be at least 1 hour");
  if (!(z_threshold > 0.0)) throw Error("bad-rule", "z threshold must be positive");
  if (window_days < 1) throw Error("bad-rule", "window must be at least 1 day");
}

std::string to_string(QualityAction action) {
  switch (action) {
    case QualityAction::filled_interpolate: return "filled-interpolate";
    case QualityAction::filled_week_aligned: return "filled-week-aligned";
    case QualityAction::flagged_outlier: return "flagged-outlier";
    case QualityAction::left_missing: return "left-missing";
  }
  return "left-missing";
}

std::map<QualityAction, std::size_t> QualityReport::counts() const {
  std::map<QualityAction, std::size_t> out;
  for (const auto& e : entries) ++out[e.action];
  return out;
}

std::size_t QualityReport::count(QualityAction action) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [action](const QualityEntry& e) { return e.action == action; }));
}

WideFrame load_csv(const std::filesystem::path& path, const std::string& region, const std::string& variable,
                   const std::string& unit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot open " + path.string());
  return frame::read_wide_csv(in, {region, variable, unit});
}

namespace {

double median_inplace(std::vector<double>& v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

/// Continuous hourly timeline from the first to the last row date; absent days
/// are missing cells with no backing row.
struct Timeline {
  long origin = 0;  // hours of first cell
  std::vector<Cell> cells;
  std::vector<bool> backed;
};

Timeline make_timeline(const WideFrame& f) {
  Timeline t;
  if (f.empty()) return t;
  const long first = frame::to_days(f.dates().front());
  const long last = frame::to_days(f.dates().back());
  t.origin = first * kHoursPerDay;
  const auto n = static_cast<std::size_t>((last - first + 1) * kHoursPerDay);
  t.cells.assign(n, std::nullopt);
  t.backed.assign(n, false);
  for (std::size_t r = 0; r < f.size(); ++r) {
    const auto base = static_cast<std::size_t>((frame::to_days(f.dates()[r]) - first) * kHoursPerDay);
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      t.cells[base + h] = f.rows()[r][h];
      t.backed[base + h] = true;
    }
  }
  return t;
}

}  // namespace

std::vector<Timestamp> detect_outliers(const WideFrame& f, const QualityRule& rule) {
  rule.validate();
  if (static_cast<std::size_t>(rule.window_days) >= f.size()) {
    throw Error("window-too-long", std::to_string(rule.window_days) + " day window over " +
                                       std::to_string(f.size()) + " rows");
  }
  const Timeline t = make_timeline(f);
  const long half = static_cast<long>(rule.window_days) * kHoursPerDay / 2;
  const auto n = static_cast<long>(t.cells.size());
  std::vector<Timestamp> flags;
  std::vector<double> window, dev;
  for (long i = 0; i < n; ++i) {
    const auto& x = t.cells[static_cast<std::size_t>(i)];
    if (!x) continue;
    window.clear();
    for (long j = std::max(0L, i - half); j <= std::min(n - 1, i + half); ++j) {
      if (const auto& c = t.cells[static_cast<std::size_t>(j)]) window.push_back(*c);
    }
    const double med = median_inplace(window);
    dev.resize(window.size());
    for (std::size_t k = 0; k < window.size(); ++k) dev[k] = std::abs(window[k] - med);
    const double sigma = 1.4826 * median_inplace(dev);
    if (std::abs(*x - med) > rule.z_threshold * sigma) flags.push_back(frame::from_hours(t.origin + i));
  }
  return flags;
}

std::pair<WideFrame, QualityReport> fill_missing(const WideFrame& f, const QualityRule& rule) {
  rule.validate();
  Timeline t = make_timeline(f);
  const auto n = t.cells.size();
  std::vector<std::optional<QualityAction>> filled(n);

  auto week_source = [&](const std::vector<Cell>& snapshot, std::size_t i) -> Cell {
    const Timestamp ts = frame::from_hours(t.origin + static_cast<long>(i));
    const long src = frame::to_hours({frame::align_week(ts.date, 1), ts.hour}) - t.origin;
    if (src < 0) return std::nullopt;
    return snapshot[static_cast<std::size_t>(src)];
  };

  bool changed = true;
  while (changed) {
    changed = false;
    const std::vector<Cell> snapshot = t.cells;
    std::size_t i = 0;
    while (i < n) {
      if (snapshot[i]) {
        ++i;
        continue;
      }
      std::size_t end = i;
      while (end < n && !snapshot[end]) ++end;
      const std::size_t len = end - i;
      const bool flanked = i > 0 && end < n;
      const bool interpolate =
          rule.kind != RuleKind::week_fill && flanked && len <= static_cast<std::size_t>(rule.max_gap_hours);
      for (std::size_t k = i; k < end; ++k) {
        if (!t.backed[k]) continue;
        if (interpolate) {
          const double a = *snapshot[i - 1], b = *snapshot[end];
          const double w = static_cast<double>(k - i + 1) / static_cast<double>(len + 1);
          t.cells[k] = a + w * (b - a);
          filled[k] = QualityAction::filled_interpolate;
          changed = true;
        } else if (auto src = week_source(snapshot, k)) {
          t.cells[k] = *src;
          filled[k] = QualityAction::filled_week_aligned;
          changed = true;
        }
      }
      i = end;
    }
  }

  QualityReport report;
  std::vector<frame::HourRow> rows = f.rows();
  const long first_day = t.origin / kHoursPerDay;
  for (std::size_t r = 0; r < f.size(); ++r) {
    const auto base = static_cast<std::size_t>((frame::to_days(f.dates()[r]) - first_day) * kHoursPerDay);
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      if (f.rows()[r][h]) continue;
      const Timestamp ts{f.dates()[r], static_cast<int>(h)};
      if (filled[base + h]) {
        rows[r][h] = t.cells[base + h];
        report.entries.push_back({ts, *filled[base + h], std::nullopt, t.cells[base + h]});
      } else {
        report.entries.push_back({ts, QualityAction::left_missing, std::nullopt, std::nullopt});
      }
    }
  }
  return {f.with_rows(f.dates(), std::move(rows)), std::move(report)};
}

void add_outlier_flags(QualityReport& report, const WideFrame& f, const std::vector<Timestamp>& flags) {
  for (const auto& ts : flags) {
    const Cell v = f.at(ts);
    report.entries.push_back({ts, QualityAction::flagged_outlier, v, v});
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const QualityEntry& a, const QualityEntry& b) { return a.ts < b.ts; });
}

void write_quality_jsonl(std::ostream& out, const QualityReport& report) {
  for (const auto& e : report.entries) {
    nlohmann::ordered_json j;
    j["ts"] = frame::format_timestamp(e.ts);
    j["action"] = to_string(e.action);
    j["old"] = e.old_value ? nlohmann::ordered_json(*e.old_value) : nlohmann::ordered_json(nullptr);
    j["new"] = e.new_value ? nlohmann::ordered_json(*e.new_value) : nlohmann::ordered_json(nullptr);
    out << j.dump() << '\n';
  }
}

}  // namespace gridtrace::ingest
