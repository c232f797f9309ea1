#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridtrace/learners/feature_matrix.hpp"
#include "gridtrace/learners/loss.hpp"

namespace gridtrace::learners {

struct MlpSpec {
  std::vector<int> hidden{8};
  double learning_rate = 0.05;
  int epochs = 200;
  int batch_size = 32;
  std::uint64_t seed = 42;
};

/// Feed-forward network with tanh hidden layers and a linear output. Inputs and
/// target are standardized internally with statistics from the training data.
class MlpModel {
 public:
  MlpModel() = default;
  /// Random initialization (Glorot uniform) for `inputs` features.
  MlpModel(const MlpSpec& spec, Eigen::Index inputs, LossKind loss);

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

  /// Network output in standardized units for standardized inputs.
  Eigen::VectorXd forward(const Eigen::MatrixXd& xs) const;
  /// Mean loss over (xs, ys) in standardized units; fills `grad` (same layout as parameters()).
  double loss_and_gradient(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys, Eigen::VectorXd* grad) const;

  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& p);

  void set_scaling(Eigen::VectorXd x_mean, Eigen::VectorXd x_scale, double y_mean, double y_scale);
  Eigen::MatrixXd standardize(const Eigen::MatrixXd& x) const;

  const MlpSpec& spec() const { return spec_; }
  const LossKind& loss() const { return loss_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
  const Eigen::VectorXd& x_mean() const { return x_mean_; }
  const Eigen::VectorXd& x_scale() const { return x_scale_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  std::vector<std::string> feature_names;
  /// Mean training loss (standardized units) before training and after each epoch.
  std::vector<double> loss_history;

 private:
  MlpSpec spec_;
  LossKind loss_ = LossKind::squared();
  std::vector<Eigen::MatrixXd> weights_;  // layer l maps width[l] -> width[l+1]
  std::vector<Eigen::VectorXd> biases_;
  Eigen::VectorXd x_mean_, x_scale_;
  double y_mean_ = 0.0, y_scale_ = 1.0;
};

/// Mini-batch gradient descent on the declared loss (pinball uses its subgradient).
/// Deterministic for a given seed. Errors: "misaligned", "bad-spec", "diverged".
MlpModel fit_mlp(const FeatureMatrix& x, std::span<const double> y, const MlpSpec& spec,
                 LossKind loss = LossKind::squared());

}  // namespace gridtrace::learners
