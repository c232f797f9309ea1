#include "gridtrace/learners/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gridtrace/error.hpp"

namespace gridtrace::learners {

MlpModel::MlpModel(const MlpSpec& spec, Eigen::Index inputs, LossKind loss) : spec_(spec), loss_(loss) {
  std::vector<Eigen::Index> widths{inputs};
  for (int h : spec.hidden) widths.push_back(h);
  widths.push_back(1);
  std::mt19937_64 rng(spec.seed);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(widths[l] + widths[l + 1]));
    std::uniform_real_distribution<double> u(-limit, limit);
    Eigen::MatrixXd w(widths[l + 1], widths[l]);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = u(rng);
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(widths[l + 1]));
  }
  x_mean_ = Eigen::VectorXd::Zero(inputs);
  x_scale_ = Eigen::VectorXd::Ones(inputs);
}

void MlpModel::set_scaling(Eigen::VectorXd x_mean, Eigen::VectorXd x_scale, double y_mean, double y_scale) {
  x_mean_ = std::move(x_mean);
  x_scale_ = std::move(x_scale);
  y_mean_ = y_mean;
  y_scale_ = y_scale;
}

Eigen::MatrixXd MlpModel::standardize(const Eigen::MatrixXd& x) const {
  if (x.cols() != x_mean_.size()) throw Error("misaligned", "feature count differs from the fitted model");
  return (x.rowwise() - x_mean_.transpose()).array().rowwise() / x_scale_.transpose().array();
}

Eigen::VectorXd MlpModel::forward(const Eigen::MatrixXd& xs) const {
  Eigen::MatrixXd act = xs.transpose();  // features x samples
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = (weights_[l] * act).colwise() + biases_[l];
    act = l + 1 < weights_.size() ? Eigen::MatrixXd(z.array().tanh()) : z;
  }
  return act.row(0).transpose();
}

Eigen::VectorXd MlpModel::predict(const Eigen::MatrixXd& x) const {
  return (forward(standardize(x)).array() * y_scale_ + y_mean_).matrix();
}

double MlpModel::loss_and_gradient(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys, Eigen::VectorXd* grad) const {
  const auto layers = weights_.size();
  std::vector<Eigen::MatrixXd> acts{xs.transpose()};
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = (weights_[l] * acts.back()).colwise() + biases_[l];
    acts.push_back(l + 1 < layers ? Eigen::MatrixXd(z.array().tanh()) : z);
  }
  const Eigen::Index n = xs.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  Eigen::MatrixXd delta(1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    total += loss_(ys[i], acts.back()(0, i));
    delta(0, i) = loss_.derivative(ys[i], acts.back()(0, i)) * inv_n;
  }
  if (grad) {
    std::vector<Eigen::MatrixXd> gw(layers);
    std::vector<Eigen::VectorXd> gb(layers);
    for (std::size_t l = layers; l-- > 0;) {
      gw[l] = delta * acts[l].transpose();
      gb[l] = delta.rowwise().sum();
      if (l > 0) {
        delta = (weights_[l].transpose() * delta).array() * (1.0 - acts[l].array().square());
      }
    }
    Eigen::Index size = 0;
    for (std::size_t l = 0; l < layers; ++l) size += gw[l].size() + gb[l].size();
    grad->resize(size);
    Eigen::Index off = 0;
    for (std::size_t l = 0; l < layers; ++l) {
      grad->segment(off, gw[l].size()) = Eigen::Map<const Eigen::VectorXd>(gw[l].data(), gw[l].size());
      off += gw[l].size();
      grad->segment(off, gb[l].size()) = gb[l];
      off += gb[l].size();
    }
  }
  return total * inv_n;
}

Eigen::VectorXd MlpModel::parameters() const {
  Eigen::Index size = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) size += weights_[l].size() + biases_[l].size();
  Eigen::VectorXd p(size);
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    p.segment(off, weights_[l].size()) = Eigen::Map<const Eigen::VectorXd>(weights_[l].data(), weights_[l].size());
    off += weights_[l].size();
    p.segment(off, biases_[l].size()) = biases_[l];
    off += biases_[l].size();
  }
  return p;
}

void MlpModel::set_parameters(const Eigen::VectorXd& p) {
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (off + weights_[l].size() + biases_[l].size() > p.size()) throw Error("misaligned", "parameter vector too short");
    Eigen::Map<Eigen::VectorXd>(weights_[l].data(), weights_[l].size()) = p.segment(off, weights_[l].size());
    off += weights_[l].size();
    biases_[l] = p.segment(off, biases_[l].size());
    off += biases_[l].size();
  }
  if (off != p.size()) throw Error("misaligned", "parameter vector has the wrong length");
}

MlpModel fit_mlp(const FeatureMatrix& x, std::span<const double> y_in, const MlpSpec& spec, LossKind loss) {
  if (static_cast<Eigen::Index>(y_in.size()) != x.rows()) throw Error("misaligned", "feature rows differ from targets");
  if (x.rows() == 0) throw Error("misaligned", "no training rows");
  if (spec.epochs < 0 || spec.batch_size < 1 || !(spec.learning_rate > 0.0) ||
      std::any_of(spec.hidden.begin(), spec.hidden.end(), [](int h) { return h < 1; })) {
    throw Error("bad-spec", "mlp needs positive hidden sizes, learning rate and batch size");
  }
  const Eigen::VectorXd y = as_vector(y_in);
  const Eigen::MatrixXd& raw = x.values();

  MlpModel model(spec, raw.cols(), loss);
  model.feature_names = x.names();
  const Eigen::VectorXd mu = raw.colwise().mean();
  Eigen::VectorXd sd = ((raw.rowwise() - mu.transpose()).array().square().colwise().mean()).sqrt().matrix();
  for (auto& s : sd) s = s > 1e-12 ? s : 1.0;
  const double y_mu = y.mean();
  double y_sd = std::sqrt((y.array() - y_mu).square().mean());
  if (!(y_sd > 1e-12)) y_sd = 1.0;
  model.set_scaling(mu, sd, y_mu, y_sd);

  const Eigen::MatrixXd xs = model.standardize(raw);
  const Eigen::VectorXd ys = (y.array() - y_mu) / y_sd;
  model.loss_history.push_back(model.loss_and_gradient(xs, ys, nullptr));

  std::mt19937_64 rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(xs.rows()));
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd params = model.parameters(), grad;
  const auto batch = static_cast<std::size_t>(spec.batch_size);
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      Eigen::MatrixXd bx(static_cast<Eigen::Index>(end - start), xs.cols());
      Eigen::VectorXd by(bx.rows());
      for (std::size_t i = start; i < end; ++i) {
        bx.row(static_cast<Eigen::Index>(i - start)) = xs.row(order[i]);
        by[static_cast<Eigen::Index>(i - start)] = ys[order[i]];
      }
      model.loss_and_gradient(bx, by, &grad);
      params -= spec.learning_rate * grad;
      model.set_parameters(params);
    }
    const double epoch_loss = model.loss_and_gradient(xs, ys, nullptr);
    if (!std::isfinite(epoch_loss)) throw Error("diverged", "training loss became non-finite at epoch " + std::to_string(epoch + 1));
    model.loss_history.push_back(epoch_loss);
  }
  return model;
}

}  // namespace gridtrace::learners
