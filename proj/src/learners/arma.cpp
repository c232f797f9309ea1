#include "gridtrace/learners/arma.hpp"

#include <cmath>
#include <limits>

#include "gridtrace/error.hpp"
#include "gridtrace/frame/csv.hpp"
#include "gridtrace/learners/nelder_mead.hpp"

namespace gridtrace::learners {

std::string ArmaOrder::describe() const {
  return std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q);
}

ArmaOrder ArmaOrder::parse(const std::string& text) {
  const auto parts = frame::split_record(text);
  if (parts.size() == 3) {
    auto p = frame::parse_number(parts[0]), d = frame::parse_number(parts[1]), q = frame::parse_number(parts[2]);
    if (p && d && q && *p >= 0 && *d >= 0 && *q >= 0 && *p == std::floor(*p) && *d == std::floor(*d) &&
        *q == std::floor(*q)) {
      return {static_cast<int>(*p), static_cast<int>(*d), static_cast<int>(*q)};
    }
  }
  throw Error("bad-spec", "expected ARMA order 'p,d,q', got '" + text + "'");
}

double companion_spectral_radius(const Eigen::VectorXd& coef) {
  const Eigen::Index p = coef.size();
  if (p == 0) return 0.0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
  c.row(0) = coef.transpose();
  for (Eigen::Index i = 1; i < p; ++i) c(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

std::vector<double> difference(std::span<const double> x, int d) {
  std::vector<double> w(x.begin(), x.end());
  for (int k = 0; k < d; ++k) {
    std::vector<double> next;
    for (std::size_t i = 1; i < w.size(); ++i) next.push_back(w[i] - w[i - 1]);
    w = std::move(next);
  }
  return w;
}

// Conditional residuals e_t, t >= p, with pre-sample errors at zero.
double css_residuals(const std::vector<double>& z, const Eigen::VectorXd& ar, const Eigen::VectorXd& ma,
                     std::vector<double>& e) {
  const auto p = static_cast<std::size_t>(ar.size());
  const auto q = static_cast<std::size_t>(ma.size());
  e.assign(z.size(), 0.0);
  double ss = 0.0;
  for (std::size_t t = p; t < z.size(); ++t) {
    double pred = 0.0;
    for (std::size_t i = 0; i < p; ++i) pred += ar[static_cast<Eigen::Index>(i)] * z[t - i - 1];
    for (std::size_t j = 0; j < q && j < t; ++j) pred += ma[static_cast<Eigen::Index>(j)] * e[t - j - 1];
    e[t] = z[t] - pred;
    ss += e[t] * e[t];
  }
  return ss;
}

Eigen::VectorXd ols_ar(const std::vector<double>& z, int p) {
  if (p == 0) return {};
  const auto n = static_cast<Eigen::Index>(z.size()) - p;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    y[t] = z[static_cast<std::size_t>(t + p)];
    for (int i = 0; i < p; ++i) x(t, i) = z[static_cast<std::size_t>(t + p - i - 1)];
  }
  Eigen::VectorXd phi = x.colPivHouseholderQr().solve(y);
  // shrink towards zero until the start is stationary
  while (companion_spectral_radius(phi) >= 0.99) phi *= 0.9;
  return phi;
}

}  // namespace

ArmaModel fit_arma_css(std::span<const double> series, ArmaOrder order) {
  if (order.p < 0 || order.d < 0 || order.q < 0) throw Error("bad-spec", "negative ARMA order");
  const int k = order.p + order.q + 1;
  const std::vector<double> w = difference(series, order.d);
  if (static_cast<int>(w.size()) < 3 * k || static_cast<int>(w.size()) <= order.p + 1) {
    throw Error("short-series", std::to_string(w.size()) + " differenced points for ARMA(" + order.describe() + ")");
  }
  for (double v : series) {
    if (!std::isfinite(v)) throw Error("bad-features", "series must be finite");
  }

  ArmaModel m;
  m.order = order;
  m.low_sample = static_cast<int>(w.size()) < 10 * k;
  m.history.assign(series.begin(), series.end());
  if (order.d == 0) {
    double s = 0.0;
    for (double v : w) s += v;
    m.mean = s / static_cast<double>(w.size());
  }
  std::vector<double> z(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) z[i] = w[i] - m.mean;

  const Eigen::VectorXd phi0 = ols_ar(z, order.p);
  Eigen::VectorXd start(order.p + order.q);
  start << phi0, Eigen::VectorXd::Zero(order.q);

  std::vector<double> scratch;
  auto objective = [&](const Eigen::VectorXd& theta) {
    const double ss = css_residuals(z, theta.head(order.p), theta.tail(order.q), scratch);
    return std::isfinite(ss) ? ss : std::numeric_limits<double>::max();
  };
  NelderMeadOptions opt;
  opt.max_iterations = 4000 * std::max(1, order.p + order.q);
  auto nm = nelder_mead(objective, start, opt);
  if (!nm.converged) {
    throw Error("no-converge", "Nelder-Mead stalled after " + std::to_string(nm.iterations) +
                                   " iterations, CSS " + frame::format_number(nm.value));
  }
  m.ar = nm.x.head(order.p);
  m.ma = nm.x.tail(order.q);
  m.iterations = nm.iterations;
  m.objective_trace = std::move(nm.trace);
  if (companion_spectral_radius(m.ar) >= 1.0) {
    throw Error("unstable", "AR polynomial has a root on or inside the unit circle");
  }
  m.css = css_residuals(z, m.ar, m.ma, m.residuals);
  const double dof = static_cast<double>(z.size()) - order.p;
  m.sigma2 = m.css / dof;
  return m;
}

std::vector<std::optional<double>> ArmaModel::fitted() const { return filter(history); }

std::vector<std::optional<double>> ArmaModel::filter(std::span<const double> series) const {
  const std::vector<double> w = difference(series, order.d);
  std::vector<double> z(w.size()), e;
  for (std::size_t i = 0; i < w.size(); ++i) z[i] = w[i] - mean;
  css_residuals(z, ar, ma, e);
  std::vector<std::optional<double>> out(series.size());
  const auto skip = static_cast<std::size_t>(order.d + order.p);
  for (std::size_t i = skip; i < series.size(); ++i) {
    out[i] = series[i] - e[i - static_cast<std::size_t>(order.d)];
  }
  return out;
}

std::vector<double> ArmaModel::forecast(int horizon) const {
  if (horizon <= 0) return {};
  // levels[0] = history, levels[l] = l-th difference
  std::vector<std::vector<double>> levels{history};
  for (int l = 0; l < order.d; ++l) levels.push_back(difference(levels.back(), 1));
  std::vector<double> z(levels.back().size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = levels.back()[i] - mean;
  std::vector<double> e = residuals;
  const auto p = static_cast<std::size_t>(ar.size());
  const auto q = static_cast<std::size_t>(ma.size());
  std::vector<double> out;
  for (int h = 0; h < horizon; ++h) {
    const std::size_t t = z.size();
    double pred = 0.0;
    for (std::size_t i = 0; i < p && i < t; ++i) pred += ar[static_cast<Eigen::Index>(i)] * z[t - i - 1];
    for (std::size_t j = 0; j < q && j < t; ++j) pred += ma[static_cast<Eigen::Index>(j)] * e[t - j - 1];
    z.push_back(pred);
    e.push_back(0.0);
    double value = pred + mean;
    for (int l = order.d - 1; l >= 0; --l) {
      auto& lvl = levels[static_cast<std::size_t>(l)];
      value += lvl.back();
      lvl.push_back(value);
    }
    out.push_back(value);
  }
  return out;
}

double ArmaModel::ar_spectral_radius() const { return companion_spectral_radius(ar); }

}  // namespace gridtrace::learners
