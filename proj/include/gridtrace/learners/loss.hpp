#pragma once

#include <string>

#include <Eigen/Dense>

namespace gridtrace::learners {

/// q (y - yhat) when y >= yhat, otherwise (1 - q)(yhat - y).
inline double pinball(double y, double yhat, double q) { return y >= yhat ? q * (y - yhat) : (1.0 - q) * (yhat - y); }

class LossKind {
 public:
  enum class Kind { squared, pinball };

  static LossKind squared() { return LossKind(Kind::squared, 0.5); }
  /// Throws Error("bad-quantile") unless 0 < q < 1.
  static LossKind pinball(double q);

  Kind kind() const { return kind_; }
  double quantile() const { return q_; }
  bool is_pinball() const { return kind_ == Kind::pinball; }

  double operator()(double y, double yhat) const {
    return kind_ == Kind::squared ? (y - yhat) * (y - yhat) : learners::pinball(y, yhat, q_);
  }
  double mean(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) const;
  /// d loss / d yhat (a subgradient for pinball; zero at the kink).
  double derivative(double y, double yhat) const;

  std::string describe() const;
  static LossKind parse(const std::string& text);

  friend bool operator==(const LossKind&, const LossKind&) = default;

 private:
  LossKind(Kind k, double q) : kind_(k), q_(q) {}
  Kind kind_;
  double q_;
};

}  // namespace gridtrace::learners
