#include "gridtrace/learners/loss.hpp"

#include <cmath>

#include "gridtrace/error.hpp"
#include "gridtrace/frame/csv.hpp"

namespace gridtrace::learners {

LossKind LossKind::pinball(double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error("bad-quantile", "pinball level must lie strictly inside (0, 1)");
  return LossKind(Kind::pinball, q);
}

double LossKind::mean(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += (*this)(y[i], yhat[i]);
  return y.size() > 0 ? s / static_cast<double>(y.size()) : 0.0;
}

double LossKind::derivative(double y, double yhat) const {
  if (kind_ == Kind::squared) return 2.0 * (yhat - y);
  if (yhat > y) return 1.0 - q_;
  if (yhat < y) return -q_;
  return 0.0;
}

std::string LossKind::describe() const {
  return kind_ == Kind::squared ? "squared" : "pinball:" + frame::format_number(q_);
}

LossKind LossKind::parse(const std::string& text) {
  if (text == "squared") return squared();
  if (text.rfind("pinball:", 0) == 0) {
    if (auto q = frame::parse_number(text.substr(8))) return pinball(*q);
  }
  throw Error("bad-loss", "expected 'squared' or 'pinball:<q>', got '" + text + "'");
}

}  // namespace gridtrace::learners
