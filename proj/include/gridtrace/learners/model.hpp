#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gridtrace/learners/arma.hpp"
#include "gridtrace/learners/feature_matrix.hpp"
#include "gridtrace/learners/loss.hpp"
#include "gridtrace/learners/mlp.hpp"
#include "gridtrace/learners/ridge.hpp"

namespace gridtrace::learners {

struct RidgeSpec {
  double lambda = 0.0;
  friend bool operator==(const RidgeSpec&, const RidgeSpec&) = default;
};

struct LearnerSpec {
  std::variant<RidgeSpec, MlpSpec, ArmaOrder> kind = RidgeSpec{};
  LossKind loss = LossKind::squared();

  /// Throws Error("bad-spec") on negative lambda, non-positive hidden sizes,
  /// epochs < 1, non-positive learning rate or batch size, or negative ARMA orders.
  void validate() const;
  std::string describe() const;
  bool is_arma() const { return std::holds_alternative<ArmaOrder>(kind); }
};

using FittedModel = std::variant<RidgeModel, MlpModel, ArmaModel>;

/// Fits `spec` on (x, y). ARMA specs ignore x and treat y as the series.
FittedModel fit(const LearnerSpec& spec, const FeatureMatrix& x, std::span<const double> y);

/// Predictions of a ridge or MLP model; ARMA models throw Error("bad-spec").
Eigen::VectorXd predict(const FittedModel& model, const Eigen::MatrixXd& x);

nlohmann::ordered_json to_json(const LearnerSpec& spec);
LearnerSpec spec_from_json(const nlohmann::ordered_json& j);

/// Serialized model: spec, coefficient arrays and training metadata.
nlohmann::ordered_json to_json(const FittedModel& model);
/// Inverse of to_json; throws Error("bad-model") on malformed input.
FittedModel model_from_json(const nlohmann::ordered_json& j);

struct GridSearchResult {
  LearnerSpec best;
  std::size_t best_index = 0;
  std::vector<double> losses;  // mean validation loss per grid entry
};

/// k contiguous time-ordered folds. Ridge and MLP entries hold out each block
/// in turn; ARMA entries are scored by one-step forecasts on block i after fitting
/// on blocks before it. Ties go to the earlier grid entry.
/// Errors: "empty-grid", "bad-folds" (k < 2 or fewer rows than folds).
GridSearchResult grid_search(std::span<const LearnerSpec> grid, const FeatureMatrix& x, std::span<const double> y,
                             int k);

}  // namespace gridtrace::learners
