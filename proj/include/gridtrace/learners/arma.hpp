#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gridtrace::learners {

struct ArmaOrder {
  int p = 0;
  int d = 0;
  int q = 0;

  std::string describe() const;
  /// Parses "p,d,q".
  static ArmaOrder parse(const std::string& text);
  friend bool operator==(const ArmaOrder&, const ArmaOrder&) = default;
};

/// ARIMA(p, d, q) fitted by conditional sum of squares. A mean term is kept only
/// when d == 0 (fixed at the sample mean of the series).
struct ArmaModel {
  ArmaOrder order;
  double mean = 0.0;
  Eigen::VectorXd ar;
  Eigen::VectorXd ma;
  double sigma2 = 0.0;
  double css = 0.0;
  int iterations = 0;
  /// Set when the differenced sample is shorter than 10 (p + q + 1).
  bool low_sample = false;
  std::vector<double> objective_trace;

  std::vector<double> history;    // original-scale series
  std::vector<double> residuals;  // one-step errors on the differenced scale, zero before index p

  /// One-step-ahead in-sample fit on the original scale (nullopt for the first d + p points).
  std::vector<std::optional<double>> fitted() const;
  /// h-step forecasts continuing `history`.
  std::vector<double> forecast(int horizon) const;
  /// One-step predictions over a new series with the fitted coefficients.
  std::vector<std::optional<double>> filter(std::span<const double> series) const;
  /// Largest modulus of the AR companion matrix eigenvalues.
  double ar_spectral_radius() const;
};

/// Differences `d` times, then minimizes the conditional sum of squares over
/// AR/MA coefficients with Nelder-Mead from an OLS AR(p) start (MA at zero).
/// Errors: "short-series" (fewer than 3 (p + q + 1) differenced points),
/// "unstable" (AR root on/inside the unit circle), "no-converge".
ArmaModel fit_arma_css(std::span<const double> series, ArmaOrder order);

/// Largest eigenvalue modulus of the companion matrix of x_t = sum coef_i x_{t-i}.
double companion_spectral_radius(const Eigen::VectorXd& coef);

}  // namespace gridtrace::learners
