#include "gridtrace/frame/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "gridtrace/error.hpp"

namespace gridtrace::frame {

namespace chr = std::chrono;

Date make_date(int year, unsigned month, unsigned day) {
  Date d{chr::year{year}, chr::month{month}, chr::day{day}};
  if (!d.ok()) {
    throw Error("bad-date", std::to_string(year) + "-" + std::to_string(month) + "-" + std::to_string(day));
  }
  return d;
}

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour) {
  if (hour < 0 || hour > 23) throw Error("bad-date", "hour " + std::to_string(hour) + " outside 0-23");
  return {make_date(year, month, day), hour};
}

long to_days(const Date& d) { return chr::sys_days{d}.time_since_epoch().count(); }

Date from_days(long days) { return Date{chr::sys_days{chr::days{days}}}; }

Date add_days(const Date& d, long n) { return Date{chr::sys_days{d} + chr::days{n}}; }

unsigned weekday_index(const Date& d) { return chr::weekday{chr::sys_days{d}}.c_encoding(); }

bool is_leap_year(int year) { return chr::year{year}.is_leap(); }

unsigned days_in_month(int year, unsigned month) {
  return static_cast<unsigned>(chr::year_month_day_last{chr::year{year}, chr::month_day_last{chr::month{month}}}.day());
}

int year_of(const Date& d) { return static_cast<int>(d.year()); }
unsigned month_of(const Date& d) { return static_cast<unsigned>(d.month()); }
unsigned day_of(const Date& d) { return static_cast<unsigned>(d.day()); }

namespace {

template <typename T>
bool parse_fixed(std::string_view text, T& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_fixed(text.substr(0, 4), y) ||
      !parse_fixed(text.substr(5, 2), m) || !parse_fixed(text.substr(8, 2), d)) {
    throw Error("bad-date", "expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  Date date{chr::year{y}, chr::month{m}, chr::day{d}};
  if (!date.ok()) throw Error("bad-date", "no such calendar date '" + std::string(text) + "'");
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year_of(d), month_of(d), day_of(d));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  int hour = -1;
  if (text.size() != 13 || text[10] != 'T' || !parse_fixed(text.substr(11, 2), hour) || hour > 23) {
    throw Error("bad-date", "expected YYYY-MM-DDTHH, got '" + std::string(text) + "'");
  }
  return {parse_date(text.substr(0, 10)), hour};
}

std::string format_timestamp(const Timestamp& ts) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "T%02d", ts.hour);
  return format_date(ts.date) + buf;
}

long to_hours(const Timestamp& ts) { return to_days(ts.date) * 24 + ts.hour; }

Timestamp from_hours(long hours) {
  long days = hours >= 0 ? hours / 24 : -((-hours + 23) / 24);
  return {from_days(days), static_cast<int>(hours - days * 24)};
}

Date align_date(const Date& d, int years_back) {
  const chr::year target{year_of(d) - years_back};
  Date out{target, d.month(), d.day()};
  if (!out.ok()) out = Date{target, d.month(), chr::day{28}};  // Feb 29 -> Feb 28
  return out;
}

Date align_week(const Date& d, int years_back) { return add_days(d, -364L * years_back); }

}  // namespace gridtrace::frame
