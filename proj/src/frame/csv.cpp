#include "gridtrace/frame/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "gridtrace/error.hpp"

namespace gridtrace::frame {

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_record(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

namespace {

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void strip_bom(std::string& line) {
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
}

}  // namespace

WideFrame read_wide_csv(std::istream& in, FrameMeta meta) {
  std::string line;
  if (!read_line(in, line)) throw Error("bad-header", "file is empty");
  strip_bom(line);
  const auto header = split_record(line);
  bool header_ok = header.size() == kHoursPerDay + 1 && header[0] == "date";
  for (std::size_t h = 1; header_ok && h < header.size(); ++h) {
    header_ok = header[h] == std::to_string(h - 1);
  }
  if (!header_ok) throw Error("bad-header", "expected 'date,0,1,...,23', got '" + line + "'");

  std::vector<std::pair<Date, HourRow>> records;
  std::size_t row = 1;
  while (read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_record(line);
    if (fields.size() != kHoursPerDay + 1) {
      throw Error("bad-cell", "row " + std::to_string(row) + ": expected 25 fields, got " +
                                  std::to_string(fields.size()));
    }
    Date date;
    try {
      date = parse_date(fields[0]);
    } catch (const Error& e) {
      throw Error("bad-cell", "row " + std::to_string(row) + " column date: " + e.what());
    }
    HourRow values;
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      std::string_view f = fields[h + 1];
      if (f.empty()) continue;
      auto v = parse_number(f);
      if (!v) {
        throw Error("bad-cell", "row " + std::to_string(row) + " column " + std::to_string(h) + ": '" +
                                    std::string(f) + "'");
      }
      values[h] = *v;
    }
    records.emplace_back(date, values);
  }
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].first == records[i - 1].first) throw Error("dup-date", format_date(records[i].first));
  }
  std::vector<Date> dates;
  std::vector<HourRow> rows;
  dates.reserve(records.size());
  rows.reserve(records.size());
  for (auto& [d, r] : records) {
    dates.push_back(d);
    rows.push_back(r);
  }
  return WideFrame(std::move(meta), std::move(dates), std::move(rows));
}

void write_wide_csv(std::ostream& out, const WideFrame& frame) {
  out << "date";
  for (int h = 0; h < kHoursPerDay; ++h) out << ',' << h;
  out << '\n';
  for (std::size_t r = 0; r < frame.size(); ++r) {
    out << format_date(frame.dates()[r]);
    for (const auto& c : frame.rows()[r]) {
      out << ',';
      if (c) out << format_number(*c);
    }
    out << '\n';
  }
}

const std::vector<Cell>& Table::column(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error("unknown-column", name);
  return columns[static_cast<std::size_t>(it - names.begin())];
}

std::vector<double> Table::dense_column(const std::string& name) const {
  const auto& col = column(name);
  std::vector<double> out;
  out.reserve(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (!col[i]) throw Error("missing-values", "column '" + name + "' row " + labels[i]);
    out.push_back(*col[i]);
  }
  return out;
}

Table read_table_csv(std::istream& in) {
  std::string line;
  if (!read_line(in, line)) throw Error("bad-header", "file is empty");
  strip_bom(line);
  const auto header = split_record(line);
  if (header.size() < 2) throw Error("bad-header", "need a label column and at least one value column");
  Table t;
  t.label_header = std::string(header[0]);
  for (std::size_t i = 1; i < header.size(); ++i) t.names.emplace_back(header[i]);
  t.columns.resize(t.names.size());
  std::size_t row = 1;
  while (read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_record(line);
    if (fields.size() != header.size()) {
      throw Error("bad-cell", "row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                                  " fields");
    }
    t.labels.emplace_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      Cell v;
      if (!fields[c].empty()) {
        v = parse_number(fields[c]);
        if (!v) {
          throw Error("bad-cell", "row " + std::to_string(row) + " column " + t.names[c - 1] + ": '" +
                                      std::string(fields[c]) + "'");
        }
      }
      t.columns[c - 1].push_back(v);
    }
  }
  return t;
}

void write_table_csv(std::ostream& out, const Table& table) {
  out << table.label_header;
  for (const auto& n : table.names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < table.labels.size(); ++r) {
    out << table.labels[r];
    for (const auto& col : table.columns) {
      out << ',';
      if (col[r]) out << format_number(*col[r]);
    }
    out << '\n';
  }
}

}  // namespace gridtrace::frame
