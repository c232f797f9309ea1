#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridtrace/regress/tests.hpp"

namespace gridtrace::regress {

/// y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + e_t, e_t ~ (0, sigma).
struct VarModel {
  std::vector<std::string> names;
  int order = 1;
  Eigen::VectorXd intercept;
  std::vector<Eigen::MatrixXd> lags;  // A_1..A_p, each k x k
  Eigen::MatrixXd sigma;              // residual covariance (dof adjusted)
  Eigen::MatrixXd data;               // n x k estimation sample
  Eigen::MatrixXd residuals;          // (n - p) x k

  std::size_t dimension() const { return names.size(); }
  Eigen::MatrixXd companion() const;
  double spectral_radius() const;
  /// One-step in-sample predictions for rows p..n-1 of `data`.
  Eigen::MatrixXd one_step(const Eigen::MatrixXd& data) const;

  /// Model with given coefficients (no estimation sample).
  static VarModel from_coefficients(std::vector<std::string> names, Eigen::VectorXd intercept,
                                    std::vector<Eigen::MatrixXd> lags, Eigen::MatrixXd sigma);
};

struct EquationDiagnostics {
  std::string variable;
  double r2 = 0.0;
  TestResult residual_adf;
  TestResult ljung_box;
  double durbin_watson = 0.0;
};

struct VarReport {
  VarModel model;
  std::vector<EquationDiagnostics> equations;
  /// Pre-estimation battery: ADF per variable, pairwise Granger and Engle-Granger.
  std::vector<TestResult> pre_tests;
  std::vector<std::string> notes;
};

/// Equation-by-equation OLS on all k p lags plus intercept.
/// Errors: "short-series" (n < 10 k p), "collinear", "misaligned", "bad-spec".
VarReport fit_var(const std::vector<std::string>& names, const Eigen::MatrixXd& data, int p);

/// Responses at horizons 0..horizon; entry (i, j) of element h is the response of
/// variable i to a shock in j. Orthogonalized shocks use the lower Cholesky factor
/// of sigma in declared variable order; otherwise unit shocks.
/// Errors: "unstable", "bad-covariance".
std::vector<Eigen::MatrixXd> impulse_response(const VarModel& model, int horizon, bool orthogonalized = true);

/// Element h-1 holds the h-step decomposition; row i gives the share of
/// variable i's forecast error variance due to each shock (rows sum to 1).
std::vector<Eigen::MatrixXd> fevd(const VarModel& model, int horizon);

struct RobustnessSummary {
  double epsilon = 0.0;
  std::vector<double> inflation;  // relative one-step RMSE increase per trial
  double median_inflation = 0.0;
  double max_inflation = 0.0;
  int unstable_trials = 0;
  bool unstable() const { return unstable_trials > 0; }
};

/// Multiplies every coefficient by (1 + u), u ~ U(-epsilon, epsilon), per trial.
RobustnessSummary robustness_test(const VarModel& model, double epsilon, int trials, std::uint64_t seed = 42);

}  // namespace gridtrace::regress
