#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridtrace/frame/wide_frame.hpp"

namespace gridtrace::frame {

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);
/// Strict decimal parse of a whole field; nullopt on failure.
std::optional<double> parse_number(std::string_view text);

/// Splits one CSV record on commas (no quoting in these formats); strips a trailing CR.
std::vector<std::string_view> split_record(std::string_view line);

/// Wide-frame CSV: header `date,0,1,...,23`, `YYYY-MM-DD` dates, empty field = missing.
/// Rows come back sorted by date. Errors: "bad-header", "bad-cell" (with row and
/// column), "dup-date".
WideFrame read_wide_csv(std::istream& in, FrameMeta meta);
void write_wide_csv(std::ostream& out, const WideFrame& frame);

/// Column table: first column is a free-form label (date or timestamp), the rest numeric.
struct Table {
  std::string label_header;
  std::vector<std::string> labels;
  std::vector<std::string> names;
  std::vector<std::vector<Cell>> columns;

  const std::vector<Cell>& column(const std::string& name) const;
  /// Column with no missing cells; throws Error("missing-values") otherwise.
  std::vector<double> dense_column(const std::string& name) const;
};

Table read_table_csv(std::istream& in);
void write_table_csv(std::ostream& out, const Table& table);

}  // namespace gridtrace::frame
