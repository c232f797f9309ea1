#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace gridtrace::frame {

using Date = std::chrono::year_month_day;

/// One hour of one calendar day; hour in [0, 23].
struct Timestamp {
  Date date;
  int hour = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

Date make_date(int year, unsigned month, unsigned day);
Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour);

/// Days since 1970-01-01.
long to_days(const Date& d);
Date from_days(long days);
Date add_days(const Date& d, long n);

/// 0 = Sunday ... 6 = Saturday.
unsigned weekday_index(const Date& d);
bool is_leap_year(int year);
unsigned days_in_month(int year, unsigned month);

int year_of(const Date& d);
unsigned month_of(const Date& d);
unsigned day_of(const Date& d);

/// Parses `YYYY-MM-DD`; throws Error("bad-date") on malformed or invalid dates.
Date parse_date(std::string_view text);
std::string format_date(const Date& d);

/// `YYYY-MM-DDTHH`
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(const Timestamp& ts);

/// Hours since 1970-01-01T00.
long to_hours(const Timestamp& ts);
Timestamp from_hours(long hours);

/// Same month/day `years_back` years earlier. Feb 29 collapses to Feb 28 when
/// the target year has no leap day.
Date align_date(const Date& d, int years_back);

/// Same weekday 364 * years_back days earlier.
Date align_week(const Date& d, int years_back);

}  // namespace gridtrace::frame
