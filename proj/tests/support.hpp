#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gridtrace/error.hpp"
#include "gridtrace/frame/wide_frame.hpp"

namespace test_support {

using gridtrace::frame::Date;
using gridtrace::frame::HourRow;
using gridtrace::frame::WideFrame;

inline std::vector<double> gaussian(std::size_t n, unsigned seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sd);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

inline std::vector<double> random_walk(std::size_t n, unsigned seed) {
  auto e = gaussian(n, seed);
  for (std::size_t i = 1; i < n; ++i) e[i] += e[i - 1];
  return e;
}

inline std::vector<double> ar1(std::size_t n, double phi, unsigned seed, std::size_t burn = 200) {
  auto e = gaussian(n + burn, seed);
  std::vector<double> x(n + burn, 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) x[i] = phi * x[i - 1] + e[i];
  return {x.begin() + static_cast<long>(burn), x.end()};
}

/// Frame of consecutive days starting at `start`; `value(day_index, hour)` supplies cells.
template <typename F>
WideFrame make_frame(Date start, std::size_t days, F value, std::string unit = "MW") {
  std::vector<Date> dates;
  std::vector<HourRow> rows;
  for (std::size_t d = 0; d < days; ++d) {
    dates.push_back(gridtrace::frame::add_days(start, static_cast<long>(d)));
    HourRow row;
    for (int h = 0; h < 24; ++h) row[static_cast<std::size_t>(h)] = value(d, h);
    rows.push_back(row);
  }
  return WideFrame({"TEST", "demand", std::move(unit)}, std::move(dates), std::move(rows));
}

template <typename F>
std::string error_code_of(F&& f) {
  try {
    f();
  } catch (const gridtrace::Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace test_support
