#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridtrace/learners/feature_matrix.hpp"

namespace gridtrace::regress {

struct Term {
  enum class Kind { intercept, linear, quadratic, interaction, log };
  Kind kind = Kind::linear;
  std::string a;
  std::string b;  // second factor of an interaction

  /// "intercept", "x", "x^2", "x:y", "log(x)".
  std::string name() const;
  /// Inverse of name(); "1" is accepted for the intercept.
  static Term parse(const std::string& text);
  friend bool operator==(const Term&, const Term&) = default;
};

struct OLSSpec {
  std::string response;
  std::vector<Term> terms;

  /// "y ~ 1 + x + x^2 + x:z + log(w)". Throws Error("bad-spec").
  static OLSSpec parse(const std::string& formula);
  std::string formula() const;
  bool has_intercept() const;
  /// Throws Error("bad-spec") on duplicate terms or an empty term list.
  void validate() const;
};

struct Coefficient {
  std::string term;
  double estimate = 0.0;
  double std_error = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
};

struct OLSReport {
  OLSSpec spec;
  std::vector<Coefficient> coefficients;
  std::size_t observations = 0;
  std::size_t df_resid = 0;
  double ssr = 0.0;
  double sigma2 = 0.0;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  std::optional<double> f_stat;
  std::optional<double> f_p_value;
  double jb_stat = 0.0;
  double jb_p_value = 1.0;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;

  const Coefficient& coefficient(const std::string& term) const;
  Eigen::VectorXd estimates() const;
};

/// Design matrix for `spec` over `data` (columns in term order).
/// Errors: "unknown-column", "non-positive-log".
Eigen::MatrixXd design_matrix(const OLSSpec& spec, const learners::FeatureMatrix& data);

/// Least squares via column-pivoted QR. Errors: "short-series" (observations <= terms),
/// "collinear" (names the dependent terms).
OLSReport fit_ols(const OLSSpec& spec, const learners::FeatureMatrix& data);

/// Same estimator on an explicit design; `names` label the columns and
/// `intercept` marks whether one of them is a constant (for centred R^2).
OLSReport fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                  bool intercept);

/// Jarque-Bera statistic of a sample (population moments).
double jarque_bera(const Eigen::VectorXd& e);

}  // namespace gridtrace::regress
