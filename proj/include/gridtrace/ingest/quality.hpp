#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "gridtrace/frame/wide_frame.hpp"

namespace gridtrace::ingest {

using frame::Cell;
using frame::Timestamp;
using frame::WideFrame;

enum class RuleKind { gap_interpolate, week_fill, outlier_flag };

/// Repair and screening parameters. With kind == week_fill every gap goes to
/// the week-aligned source; otherwise gaps up to max_gap_hours are interpolated.
struct QualityRule {
  RuleKind kind = RuleKind::gap_interpolate;
  int max_gap_hours = 3;
  double z_threshold = 5.0;
  int window_days = 7;

  /// Throws Error("bad-rule").
  void validate() const;
};

enum class QualityAction { filled_interpolate, filled_week_aligned, flagged_outlier, left_missing };

std::string to_string(QualityAction action);

struct QualityEntry {
  Timestamp ts;
  QualityAction action;
  Cell old_value;
  Cell new_value;
};

struct QualityReport {
  std::vector<QualityEntry> entries;  // chronological

  std::map<QualityAction, std::size_t> counts() const;
  std::size_t count(QualityAction action) const;
  bool empty() const { return entries.empty(); }
};

/// Reads a wide-frame CSV. Errors: "io-error" plus those of frame::read_wide_csv.
WideFrame load_csv(const std::filesystem::path& path, const std::string& region, const std::string& variable,
                   const std::string& unit);

/// Cells whose distance from the centred rolling median exceeds
/// z_threshold * 1.4826 * MAD of the same window. Window spans window_days days
/// of hours. Throws Error("window-too-long") unless window_days < frame rows.
std::vector<Timestamp> detect_outliers(const WideFrame& frame, const QualityRule& rule);

/// Repairs missing cells: short gaps flanked by present values are linearly
/// interpolated, the rest take the week-aligned value one year back when it is
/// present, repeated until nothing changes. Residual gaps are reported as
/// left-missing. Present cells are never modified.
std::pair<WideFrame, QualityReport> fill_missing(const WideFrame& frame, const QualityRule& rule);

/// Appends flagged-outlier entries (old = new = observed value) and re-sorts.
void add_outlier_flags(QualityReport& report, const WideFrame& frame, const std::vector<Timestamp>& flags);

/// One JSON object per line with fields ts, action, old, new.
void write_quality_jsonl(std::ostream& out, const QualityReport& report);

}  // namespace gridtrace::ingest
