#include "gridtrace/learners/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <numeric>

#include "gridtrace/error.hpp"

namespace gridtrace::learners {

Eigen::VectorXd RidgeModel::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != coef.size()) throw Error("misaligned", "feature count differs from the fitted model");
  return (x * coef).array() + intercept;
}

double pinball_objective(const Eigen::VectorXd& residuals, double q) {
  double s = 0.0;
  for (double r : residuals) s += r >= 0.0 ? q * r : (q - 1.0) * r;
  return s;
}

namespace {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  return a;
}

// Solves min ||sqrt(w) (y - A beta)||^2 + beta' P beta via QR on the stacked system.
Eigen::VectorXd weighted_ridge(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs_y, const Eigen::VectorXd& w,
                               double penalty, bool check_rank) {
  const Eigen::Index n = a.rows(), k = a.cols();
  const Eigen::Index extra = penalty > 0.0 ? k - 1 : 0;
  Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(n + extra, k);
  Eigen::VectorXd target = Eigen::VectorXd::Zero(n + extra);
  const Eigen::VectorXd sw = w.cwiseSqrt();
  stacked.topRows(n) = sw.asDiagonal() * a;
  target.head(n) = sw.cwiseProduct(rhs_y);
  for (Eigen::Index j = 0; j < extra; ++j) stacked(n + j, j + 1) = std::sqrt(penalty);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  if (check_rank && qr.rank() < k) throw Error("singular", "design matrix is rank deficient");
  return qr.solve(target);
}

RidgeModel finish(const FeatureMatrix& x, const Eigen::VectorXd& beta, double lambda, LossKind loss, int iters) {
  RidgeModel m;
  m.feature_names = x.names();
  m.intercept = beta[0];
  m.coef = beta.tail(beta.size() - 1);
  m.lambda = lambda;
  m.loss = loss;
  m.iterations = iters;
  return m;
}

double penalized_pinball(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& beta, double q,
                         double lambda) {
  return pinball_objective(y - a * beta, q) + lambda * beta.tail(beta.size() - 1).squaredNorm();
}

// Best basic solution interpolating the k points with the smallest |residual|.
std::optional<Eigen::VectorXd> vertex_polish(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                             const Eigen::VectorXd& residuals) {
  const Eigen::Index k = a.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(a.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return std::abs(residuals[i]) < std::abs(residuals[j]); });
  Eigen::MatrixXd basis(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    basis.row(j) = a.row(order[static_cast<std::size_t>(j)]);
    rhs[j] = y[order[static_cast<std::size_t>(j)]];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
  if (lu.rank() < k) return std::nullopt;
  return Eigen::VectorXd(lu.solve(rhs));
}

}  // namespace

RidgeModel fit_ridge(const FeatureMatrix& x, std::span<const double> y_in, double lambda, LossKind loss) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("bad-spec", "lambda must be finite and >= 0");
  if (static_cast<Eigen::Index>(y_in.size()) != x.rows()) {
    throw Error("misaligned", std::to_string(x.rows()) + " feature rows vs " + std::to_string(y_in.size()) + " targets");
  }
  if (x.rows() < x.cols() + 1) throw Error("singular", "fewer observations than parameters");
  const Eigen::VectorXd y = as_vector(y_in);
  if (!y.allFinite()) throw Error("bad-features", "targets must be finite");
  const Eigen::MatrixXd a = with_intercept(x.values());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(a.rows());

  Eigen::VectorXd beta = weighted_ridge(a, y, ones, lambda, lambda == 0.0);
  if (!loss.is_pinball()) return finish(x, beta, lambda, loss, 0);

  // pinball(r) = |r|/2 + (q - 1/2) r; |r| is majorized by r^2 / (2 max(|r0|, eps)) + const,
  // so every step solves a weighted ridge with a shifted right-hand side.
  const double q = loss.quantile();
  const double yscale = std::max(1.0, y.cwiseAbs().maxCoeff());
  int total_iters = 0;
  bool converged = false;
  double eps = 1e-6 * yscale;
  for (int level = 0; level < 4; ++level, eps *= 0.1) {
    converged = false;
    for (int it = 0; it < 2000; ++it) {
      ++total_iters;
      const Eigen::VectorXd r = y - a * beta;
      Eigen::VectorXd w(r.size());
      for (Eigen::Index i = 0; i < r.size(); ++i) w[i] = 1.0 / std::max(std::abs(r[i]), eps);
      // minimize sum w r^2 / 4 + (q - 1/2) r + lambda ||b||^2
      //   <=> weighted LS with weights w/4 towards y + (2q - 1) / w
      Eigen::VectorXd shifted(r.size());
      for (Eigen::Index i = 0; i < r.size(); ++i) shifted[i] = y[i] + (2.0 * q - 1.0) / w[i];
      const Eigen::VectorXd next = weighted_ridge(a, shifted, 0.25 * w, lambda, false);
      if (!next.allFinite()) throw Error("no-converge", "IRLS produced non-finite coefficients");
      const double step = (next - beta).cwiseAbs().maxCoeff();
      beta = next;
      if (step <= 1e-8 * (1.0 + beta.cwiseAbs().maxCoeff())) {
        converged = true;
        break;
      }
    }
  }
  if (!converged) throw Error("no-converge", "IRLS did not reach 1e-8 after " + std::to_string(total_iters) + " steps");

  if (lambda == 0.0) {
    if (auto vertex = vertex_polish(a, y, y - a * beta)) {
      if (penalized_pinball(a, y, *vertex, q, lambda) < penalized_pinball(a, y, beta, q, lambda)) beta = *vertex;
    }
  }
  return finish(x, beta, lambda, loss, total_iters);
}

}  // namespace gridtrace::learners
