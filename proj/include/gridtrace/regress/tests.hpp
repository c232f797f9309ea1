#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gridtrace::regress {

/// Outcome of a hypothesis test. When critical values are present the decision
/// compares the statistic against them (left tail), otherwise the p-value.
struct TestResult {
  std::string name;
  double statistic = 0.0;
  std::optional<double> p_value;
  std::optional<std::array<double, 3>> critical;  // 1%, 5%, 10%
  std::array<bool, 3> reject{};                   // at 1%, 5%, 10%
  std::vector<std::pair<std::string, double>> details;
  std::vector<std::string> notes;

  /// Decision at level 0.01, 0.05 or 0.10.
  bool rejects(double level) const;
  std::optional<double> detail(const std::string& key) const;
};

inline constexpr std::array<double, 3> kLevels{0.01, 0.05, 0.10};

enum class AdfRegression { none, constant, constant_trend };

struct AdfOptions {
  AdfRegression regression = AdfRegression::constant;
  /// Fixed lag; when empty the lag is chosen by AIC up to 12 (n/100)^(1/4).
  std::optional<int> lags;
};

/// Augmented Dickey-Fuller test of a unit root with MacKinnon (2010) critical
/// values and approximate p-values. A deterministic series (exact fit) returns
/// statistic -inf, rejected at every level, with a note.
/// Errors: "short-series" (length < 20 + max lag), "non-finite".
TestResult adf_test(std::span<const double> series, const AdfOptions& options = {});

/// Engle-Granger: OLS of y on (1, x), then a no-constant ADF on the residuals
/// against two-variable critical values. Errors: "misaligned", "short-series" (< 50).
TestResult cointegration_test(std::span<const double> x, std::span<const double> y);

/// F-test that `p` lags of `cause` add explanatory power for `effect` beyond its
/// own lags (both regressions with a constant). Notes record ADF advisories.
/// Errors: "short-series" (length < 10p + 20), "collinear", "misaligned".
TestResult granger_test(std::span<const double> cause, std::span<const double> effect, int p);

/// Q = n (n + 2) sum rho_k^2 / (n - k), chi-square with `lags - fitted_params` dof.
/// Errors: "short-series", "zero-variance".
TestResult ljung_box(std::span<const double> residuals, int lags, int fitted_params = 0);

/// sum (e_t - e_{t-1})^2 / sum e_t^2. Errors: "short-series", "zero-variance".
double durbin_watson(std::span<const double> residuals);

/// MacKinnon (2010) critical values for `n_vars` integrated series (1 or 2).
std::array<double, 3> mackinnon_critical(AdfRegression regression, int n_vars, std::size_t nobs);
/// MacKinnon (1994) approximate asymptotic p-value.
double mackinnon_p_value(double statistic, AdfRegression regression, int n_vars);

std::string to_string(AdfRegression r);

}  // namespace gridtrace::regress
