#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridtrace/learners/feature_matrix.hpp"
#include "gridtrace/learners/loss.hpp"

namespace gridtrace::learners {

/// Linear model with an unpenalized intercept.
struct RidgeModel {
  std::vector<std::string> feature_names;
  double intercept = 0.0;
  Eigen::VectorXd coef;
  double lambda = 0.0;
  LossKind loss = LossKind::squared();
  int iterations = 0;  // IRLS iterations (pinball only)

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

/// Squared loss: minimizes ||y - b0 - X b||^2 + lambda ||b||^2 in closed form.
/// Pinball loss: minimizes sum pinball(y, b0 + X b) + lambda ||b||^2 by
/// iteratively reweighted least squares on a Huberized pinball whose
/// smoothing width starts at 1e-6 and shrinks tenfold three times; unpenalized
/// fits finish with a vertex polish. Errors: "misaligned", "singular", "no-converge".
RidgeModel fit_ridge(const FeatureMatrix& x, std::span<const double> y, double lambda,
                     LossKind loss = LossKind::squared());

/// Sum of pinball losses of the residuals.
double pinball_objective(const Eigen::VectorXd& residuals, double q);

}  // namespace gridtrace::learners
