#include "gridtrace/regress/var.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gridtrace/error.hpp"
#include "gridtrace/regress/ols.hpp"

namespace gridtrace::regress {

Eigen::MatrixXd VarModel::companion() const {
  const auto k = static_cast<Eigen::Index>(dimension());
  const Eigen::Index kp = k * order;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(kp, kp);
  for (int i = 0; i < order; ++i) c.block(0, i * k, k, k) = lags[static_cast<std::size_t>(i)];
  if (order > 1) c.bottomLeftCorner(kp - k, kp - k).setIdentity();
  return c;
}

double VarModel::spectral_radius() const {
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion(), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd VarModel::one_step(const Eigen::MatrixXd& y) const {
  const Eigen::Index n = y.rows();
  Eigen::MatrixXd out(std::max<Eigen::Index>(n - order, 0), y.cols());
  for (Eigen::Index t = order; t < n; ++t) {
    Eigen::VectorXd v = intercept;
    for (int i = 1; i <= order; ++i) v += lags[static_cast<std::size_t>(i - 1)] * y.row(t - i).transpose();
    out.row(t - order) = v.transpose();
  }
  return out;
}

VarModel VarModel::from_coefficients(std::vector<std::string> names, Eigen::VectorXd intercept,
                                     std::vector<Eigen::MatrixXd> lags, Eigen::MatrixXd sigma) {
  const auto k = static_cast<Eigen::Index>(names.size());
  if (lags.empty()) throw Error("bad-spec", "VAR needs at least one lag matrix");
  if (intercept.size() != k || sigma.rows() != k || sigma.cols() != k) throw Error("misaligned", "VAR dimensions disagree");
  for (const auto& a : lags) {
    if (a.rows() != k || a.cols() != k) throw Error("misaligned", "lag matrices must be k x k");
  }
  VarModel m;
  m.order = static_cast<int>(lags.size());
  m.names = std::move(names);
  m.intercept = std::move(intercept);
  m.lags = std::move(lags);
  m.sigma = std::move(sigma);
  return m;
}

namespace {

Eigen::MatrixXd lag_design(const Eigen::MatrixXd& y, int p) {
  const Eigen::Index n = y.rows(), k = y.cols();
  Eigen::MatrixXd x(n - p, 1 + k * p);
  for (Eigen::Index t = p; t < n; ++t) {
    x(t - p, 0) = 1.0;
    for (int i = 1; i <= p; ++i) x.block(t - p, 1 + (i - 1) * k, 1, k) = y.row(t - i);
  }
  return x;
}

}  // namespace

VarReport fit_var(const std::vector<std::string>& names, const Eigen::MatrixXd& data, int p) {
  const auto k = static_cast<Eigen::Index>(names.size());
  if (p < 1) throw Error("bad-spec", "VAR order must be >= 1");
  if (k < 1 || data.cols() != k) throw Error("misaligned", "one column per variable name required");
  if (!data.allFinite()) throw Error("non-finite", "VAR data must be finite");
  if (data.rows() < 10 * k * p) {
    throw Error("short-series", std::to_string(data.rows()) + " rows, need " + std::to_string(10 * k * p));
  }
  const Eigen::MatrixXd x = lag_design(data, p);
  std::vector<std::string> cols{"intercept"};
  for (int i = 1; i <= p; ++i)
    for (const auto& nm : names) cols.push_back(nm + ".L" + std::to_string(i));

  VarReport report;
  VarModel& m = report.model;
  m.names = names;
  m.order = p;
  m.data = data;
  m.intercept.resize(k);
  m.lags.assign(static_cast<std::size_t>(p), Eigen::MatrixXd(k, k));
  m.residuals.resize(x.rows(), k);
  for (Eigen::Index eq = 0; eq < k; ++eq) {
    const Eigen::VectorXd y = data.col(eq).tail(x.rows());
    const OLSReport ols = fit_ols(x, y, cols, true);
    const Eigen::VectorXd b = ols.estimates();
    m.intercept[eq] = b[0];
    for (int i = 0; i < p; ++i) m.lags[static_cast<std::size_t>(i)].row(eq) = b.segment(1 + i * k, k).transpose();
    m.residuals.col(eq) = ols.residuals;

    EquationDiagnostics d;
    d.variable = names[static_cast<std::size_t>(eq)];
    d.r2 = ols.r2;
    const std::vector<double> e(ols.residuals.data(), ols.residuals.data() + ols.residuals.size());
    d.residual_adf = adf_test(e);
    d.ljung_box = ljung_box(e, std::clamp(static_cast<int>(e.size()) / 5, 1, 10));
    d.durbin_watson = durbin_watson(e);
    report.equations.push_back(std::move(d));
  }
  const double dof = static_cast<double>(x.rows() - x.cols());
  m.sigma = m.residuals.transpose() * m.residuals / dof;

  std::vector<std::vector<double>> series;
  for (Eigen::Index j = 0; j < k; ++j) series.emplace_back(data.col(j).data(), data.col(j).data() + data.rows());
  const auto attempt = [&](auto&& make, const std::string& label) {
    try {
      TestResult t = make();
      t.name = label + ":" + t.name;
      report.pre_tests.push_back(std::move(t));
    } catch (const Error& e) {
      report.notes.push_back(label + " skipped: " + e.what());
    }
  };
  for (std::size_t i = 0; i < series.size(); ++i) attempt([&] { return adf_test(series[i]); }, names[i]);
  for (std::size_t i = 0; i < series.size(); ++i) {
    for (std::size_t j = 0; j < series.size(); ++j) {
      if (i == j) continue;
      attempt([&] { return granger_test(series[i], series[j], p); }, names[i] + "->" + names[j]);
      if (i < j) attempt([&] { return cointegration_test(series[i], series[j]); }, names[i] + "~" + names[j]);
    }
  }
  if (m.spectral_radius() >= 1.0) report.notes.push_back("estimated VAR is not stable (spectral radius >= 1)");
  return report;
}

std::vector<Eigen::MatrixXd> impulse_response(const VarModel& m, int horizon, bool orthogonalized) {
  if (horizon < 0) throw Error("bad-spec", "horizon must be non-negative");
  if (m.spectral_radius() >= 1.0) throw Error("unstable", "impulse responses need a stable VAR");
  const auto k = static_cast<Eigen::Index>(m.dimension());
  Eigen::MatrixXd shock = Eigen::MatrixXd::Identity(k, k);
  if (orthogonalized) {
    Eigen::LLT<Eigen::MatrixXd> llt(m.sigma);
    if (llt.info() != Eigen::Success) throw Error("bad-covariance", "residual covariance is not positive definite");
    shock = llt.matrixL();
  }
  std::vector<Eigen::MatrixXd> psi{Eigen::MatrixXd::Identity(k, k)};
  for (int h = 1; h <= horizon; ++h) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, k);
    for (int i = 1; i <= std::min(h, m.order); ++i) next += m.lags[static_cast<std::size_t>(i - 1)] * psi[static_cast<std::size_t>(h - i)];
    psi.push_back(std::move(next));
  }
  for (auto& x : psi) x = x * shock;
  return psi;
}

std::vector<Eigen::MatrixXd> fevd(const VarModel& m, int horizon) {
  if (horizon < 1) throw Error("bad-spec", "FEVD horizon must be >= 1");
  const auto irf = impulse_response(m, horizon - 1, true);
  const auto k = static_cast<Eigen::Index>(m.dimension());
  std::vector<Eigen::MatrixXd> out;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
  for (const auto& theta : irf) {
    acc += theta.array().square().matrix();
    Eigen::MatrixXd share = acc;
    for (Eigen::Index i = 0; i < k; ++i) share.row(i) /= acc.row(i).sum();
    out.push_back(std::move(share));
  }
  return out;
}

RobustnessSummary robustness_test(const VarModel& m, double epsilon, int trials, std::uint64_t seed) {
  if (epsilon < 0.0 || trials < 1) throw Error("bad-spec", "epsilon >= 0 and trials >= 1 required");
  if (m.data.rows() <= m.order) throw Error("short-series", "robustness needs the estimation sample");
  const Eigen::MatrixXd target = m.data.bottomRows(m.data.rows() - m.order);
  const auto rmse = [&](const VarModel& v) {
    return std::sqrt((target - v.one_step(m.data)).squaredNorm() / static_cast<double>(target.size()));
  };
  const double base = rmse(m);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-epsilon, epsilon);
  const auto draw = [&] { return epsilon > 0.0 ? u(rng) : 0.0; };

  RobustnessSummary s;
  s.epsilon = epsilon;
  for (int t = 0; t < trials; ++t) {
    VarModel v = m;
    for (auto& x : v.intercept) x *= 1.0 + draw();
    for (auto& a : v.lags)
      for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] *= 1.0 + draw();
    s.inflation.push_back(base > 0.0 ? rmse(v) / base - 1.0 : 0.0);
    if (v.spectral_radius() > 1.0) ++s.unstable_trials;
  }
  std::vector<double> sorted = s.inflation;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median_inflation = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  s.max_inflation = sorted.back();
  return s;
}

}  // namespace gridtrace::regress
