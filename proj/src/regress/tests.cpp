#include "gridtrace/regress/tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridtrace/error.hpp"
#include "gridtrace/frame/csv.hpp"
#include "gridtrace/regress/ols.hpp"
#include "gridtrace/stats/distributions.hpp"

namespace gridtrace::regress {

bool TestResult::rejects(double level) const {
  for (std::size_t i = 0; i < kLevels.size(); ++i) {
    if (std::abs(level - kLevels[i]) < 1e-12) return reject[i];
  }
  if (p_value) return *p_value < level;
  throw Error("bad-level", "decisions are tabulated at 0.01, 0.05 and 0.10");
}

std::optional<double> TestResult::detail(const std::string& key) const {
  for (const auto& [k, v] : details) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string to_string(AdfRegression r) {
  switch (r) {
    case AdfRegression::none: return "n";
    case AdfRegression::constant: return "c";
    case AdfRegression::constant_trend: return "ct";
  }
  return "c";
}

namespace {

// Response-surface coefficients b0 + b1/T + b2/T^2 + b3/T^3 for 1%, 5%, 10%.
using Surface = std::array<std::array<double, 4>, 3>;

const Surface& surface(AdfRegression r, int n_vars) {
  static const Surface n1{{{-2.56574, -2.2358, -3.627, 0.0}, {-1.941, -0.2686, -3.365, 31.223}, {-1.61682, 0.2656, -2.714, 25.364}}};
  static const Surface c1{{{-3.43035, -6.5393, -16.786, -79.433}, {-2.86154, -2.8903, -4.234, -40.04}, {-2.56677, -1.5384, -2.809, 0.0}}};
  static const Surface c2{{{-3.89644, -10.9519, -33.527, 0.0}, {-3.33613, -6.1101, -6.823, 0.0}, {-3.04445, -4.2412, -2.72, 0.0}}};
  static const Surface ct1{{{-3.95877, -9.0531, -28.428, -134.155}, {-3.41049, -4.3904, -9.036, -45.374}, {-3.12705, -2.5856, -3.925, -22.38}}};
  static const Surface ct2{{{-4.32762, -15.4387, -35.679, 0.0}, {-3.78057, -9.5106, -12.074, 0.0}, {-3.49631, -7.0815, -7.538, 21.892}}};
  if (n_vars == 1) {
    return r == AdfRegression::none ? n1 : r == AdfRegression::constant ? c1 : ct1;
  }
  if (n_vars == 2 && r != AdfRegression::none) return r == AdfRegression::constant ? c2 : ct2;
  throw Error("bad-spec", "critical values tabulated for one series (n, c, ct) or two series (c, ct)");
}

struct PvalueTable {
  double star, min, max;
  std::array<double, 3> small;
  std::array<double, 4> large;
};

const PvalueTable& pvalue_table(AdfRegression r, int n_vars) {
  static const PvalueTable n1{-1.04, -19.04, std::numeric_limits<double>::infinity(), {0.6344, 1.2378, 0.032496}, {0.4797, 0.93557, -0.06999, 0.033066}};
  static const PvalueTable n2{-1.53, -19.62, 1.51, {1.9129, 1.3857, 0.035322}, {1.5578, 0.8558, -0.2083, -0.033549}};
  static const PvalueTable c1{-1.61, -18.83, 2.74, {2.1659, 1.4412, 0.038269}, {1.7339, 0.93202, -0.12745, -0.010368}};
  static const PvalueTable c2{-2.62, -18.86, 0.92, {2.92, 1.5012, 0.039796}, {2.1945, 0.64695, -0.29198, -0.042377}};
  static const PvalueTable ct1{-2.89, -16.18, 0.7, {3.2512, 1.6047, 0.049588}, {2.5261, 0.61654, -0.37956, -0.060285}};
  static const PvalueTable ct2{-3.19, -21.15, 0.63, {3.6646, 1.5419, 0.036448}, {2.85, 0.5272, -0.36622, -0.051695}};
  const bool one = n_vars == 1;
  if (n_vars != 1 && n_vars != 2) throw Error("bad-spec", "p-values tabulated for one or two series");
  switch (r) {
    case AdfRegression::none: return one ? n1 : n2;
    case AdfRegression::constant: return one ? c1 : c2;
    case AdfRegression::constant_trend: return one ? ct1 : ct2;
  }
  return c1;
}

void decide_left_tail(TestResult& r) {
  for (std::size_t i = 0; i < 3; ++i) r.reject[i] = r.statistic < (*r.critical)[i];
}

void decide_p(TestResult& r) {
  for (std::size_t i = 0; i < 3; ++i) r.reject[i] = r.p_value && *r.p_value < kLevels[i];
}

struct AdfDesign {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

// Rows use lag window `window` (rows start after it) with `lags` lagged differences.
AdfDesign adf_design(const std::vector<double>& level, int window, int lags, AdfRegression reg) {
  const auto n = static_cast<Eigen::Index>(level.size());
  const Eigen::Index nobs = n - 1 - window;
  const int det = reg == AdfRegression::none ? 0 : reg == AdfRegression::constant ? 1 : 2;
  AdfDesign d{Eigen::MatrixXd(nobs, det + 1 + lags), Eigen::VectorXd(nobs)};
  for (Eigen::Index r = 0; r < nobs; ++r) {
    const Eigen::Index t = r + window + 1;  // index into level; dx_t = x_t - x_{t-1}
    d.y[r] = level[static_cast<std::size_t>(t)] - level[static_cast<std::size_t>(t - 1)];
    Eigen::Index c = 0;
    if (det >= 1) d.x(r, c++) = 1.0;
    if (det == 2) d.x(r, c++) = static_cast<double>(r + 1);
    d.x(r, c++) = level[static_cast<std::size_t>(t - 1)];
    for (int i = 1; i <= lags; ++i) {
      d.x(r, c++) = level[static_cast<std::size_t>(t - i)] - level[static_cast<std::size_t>(t - i - 1)];
    }
  }
  return d;
}

bool degenerate(const AdfDesign& d) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.x);
  qr.setThreshold(1e-10);
  if (qr.rank() < d.x.cols()) return true;
  const double scale = std::max(d.y.squaredNorm(), 1e-300);
  return (d.y - d.x * qr.solve(d.y)).squaredNorm() <= 1e-20 * scale;
}

TestResult degenerate_result(const std::string& name, std::array<double, 3> crit, std::size_t nobs) {
  TestResult r;
  r.name = name;
  r.statistic = -std::numeric_limits<double>::infinity();
  r.p_value = 0.0;
  r.critical = crit;
  r.reject = {true, true, true};
  r.details.emplace_back("nobs", static_cast<double>(nobs));
  r.notes.push_back("deterministic series: regression fits exactly, unit root rejected trivially");
  return r;
}

}  // namespace

std::array<double, 3> mackinnon_critical(AdfRegression regression, int n_vars, std::size_t nobs) {
  const auto& s = surface(regression, n_vars);
  const double t = static_cast<double>(nobs);
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = s[i][0] + s[i][1] / t + s[i][2] / (t * t) + s[i][3] / (t * t * t);
  return out;
}

double mackinnon_p_value(double stat, AdfRegression regression, int n_vars) {
  const auto& tab = pvalue_table(regression, n_vars);
  if (stat > tab.max) return 1.0;
  if (stat < tab.min) return 0.0;
  double poly = 0.0;
  if (stat <= tab.star) {
    for (std::size_t i = tab.small.size(); i-- > 0;) poly = poly * stat + tab.small[i];
  } else {
    for (std::size_t i = tab.large.size(); i-- > 0;) poly = poly * stat + tab.large[i];
  }
  return stats::normal_cdf(poly);
}

namespace {

TestResult adf_impl(std::span<const double> series, const AdfOptions& opt, int n_vars, const std::string& name) {
  const std::vector<double> x(series.begin(), series.end());
  for (double v : x) {
    if (!std::isfinite(v)) throw Error("non-finite", "ADF input must be finite");
  }
  const auto n = x.size();
  const int trend_cols = opt.regression == AdfRegression::none ? 0 : opt.regression == AdfRegression::constant ? 1 : 2;
  const int auto_lag = std::min(static_cast<int>(n) / 2 - trend_cols - 1,
                                static_cast<int>(std::ceil(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25))));
  const int max_lag = opt.lags ? *opt.lags : std::max(auto_lag, 0);
  if (max_lag < 0) throw Error("bad-spec", "lag must be non-negative");
  if (n < static_cast<std::size_t>(20 + max_lag)) {
    throw Error("short-series", std::to_string(n) + " points, need at least " + std::to_string(20 + max_lag));
  }
  const auto crit_for = [&](std::size_t nobs) { return mackinnon_critical(opt.regression, n_vars, nobs); };

  int lag = max_lag;
  if (!opt.lags) {
    // every candidate on the common sample that the largest lag leaves
    double best_aic = std::numeric_limits<double>::infinity();
    for (int l = 0; l <= max_lag; ++l) {
      const AdfDesign d = adf_design(x, max_lag, l, opt.regression);
      if (degenerate(d)) return degenerate_result(name, crit_for(static_cast<std::size_t>(d.y.size())), static_cast<std::size_t>(d.y.size()));
      const Eigen::VectorXd e = d.y - d.x * d.x.colPivHouseholderQr().solve(d.y);
      const double nn = static_cast<double>(d.y.size());
      const double aic = nn * std::log(e.squaredNorm() / nn) + 2.0 * static_cast<double>(d.x.cols());
      if (aic < best_aic) {
        best_aic = aic;
        lag = l;
      }
    }
  }
  const AdfDesign d = adf_design(x, lag, lag, opt.regression);
  const auto nobs = static_cast<std::size_t>(d.y.size());
  if (degenerate(d)) return degenerate_result(name, crit_for(nobs), nobs);
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < d.x.cols(); ++j) names.push_back("c" + std::to_string(j));
  const OLSReport ols = fit_ols(d.x, d.y, names, opt.regression != AdfRegression::none);
  const int level_col = opt.regression == AdfRegression::none ? 0 : opt.regression == AdfRegression::constant ? 1 : 2;

  TestResult r;
  r.name = name;
  r.statistic = ols.coefficients[static_cast<std::size_t>(level_col)].t_stat;
  r.p_value = mackinnon_p_value(r.statistic, opt.regression, n_vars);
  r.critical = crit_for(nobs);
  decide_left_tail(r);
  r.details.emplace_back("lags", lag);
  r.details.emplace_back("nobs", static_cast<double>(nobs));
  r.details.emplace_back("gamma", ols.coefficients[static_cast<std::size_t>(level_col)].estimate);
  return r;
}

}  // namespace

TestResult adf_test(std::span<const double> series, const AdfOptions& options) {
  return adf_impl(series, options, 1, "adf(" + to_string(options.regression) + ")");
}

TestResult cointegration_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("misaligned", "series lengths differ");
  if (x.size() < 50) throw Error("short-series", "cointegration needs at least 50 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  design.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) design(i, 1) = x[static_cast<std::size_t>(i)];
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  const OLSReport ols = fit_ols(design, yv, {"intercept", "x"}, true);
  const std::vector<double> resid(ols.residuals.data(), ols.residuals.data() + n);

  TestResult r;
  const std::string name = "engle-granger";
  const double scale = std::max(1.0, yv.cwiseAbs().maxCoeff());
  if (ols.residuals.cwiseAbs().maxCoeff() <= 1e-10 * scale) {
    r = degenerate_result(name, mackinnon_critical(AdfRegression::constant, 2, static_cast<std::size_t>(n - 1)), static_cast<std::size_t>(n));
    r.notes = {"residuals identically zero: exact linear relation, cointegrated"};
  } else {
    AdfOptions opt;
    opt.regression = AdfRegression::none;
    const TestResult inner = adf_impl(resid, opt, 1, name);
    r = inner;
    if (std::isfinite(inner.statistic)) {
      r.critical = mackinnon_critical(AdfRegression::constant, 2, static_cast<std::size_t>(n - 1));
      r.p_value = mackinnon_p_value(r.statistic, AdfRegression::constant, 2);
      decide_left_tail(r);
    }
  }
  r.details.emplace_back("slope", ols.coefficients[1].estimate);
  r.details.emplace_back("intercept", ols.coefficients[0].estimate);
  return r;
}

TestResult granger_test(std::span<const double> cause, std::span<const double> effect, int p) {
  if (cause.size() != effect.size()) throw Error("misaligned", "series lengths differ");
  if (p < 1) throw Error("bad-spec", "lag order must be >= 1");
  const auto n = cause.size();
  if (n < static_cast<std::size_t>(10 * p + 20)) {
    throw Error("short-series", std::to_string(n) + " points, need " + std::to_string(10 * p + 20));
  }
  const auto rows = static_cast<Eigen::Index>(n) - p;
  Eigen::MatrixXd xu(rows, 1 + 2 * p);
  Eigen::VectorXd y(rows);
  std::vector<std::string> names{"intercept"};
  for (int i = 1; i <= p; ++i) names.push_back("effect.L" + std::to_string(i));
  for (int i = 1; i <= p; ++i) names.push_back("cause.L" + std::to_string(i));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto t = static_cast<std::size_t>(r + p);
    y[r] = effect[t];
    xu(r, 0) = 1.0;
    for (int i = 1; i <= p; ++i) {
      xu(r, i) = effect[t - static_cast<std::size_t>(i)];
      xu(r, p + i) = cause[t - static_cast<std::size_t>(i)];
    }
  }
  const OLSReport unrestricted = fit_ols(xu, y, names, true);
  const OLSReport restricted =
      fit_ols(xu.leftCols(1 + p), y, std::vector<std::string>(names.begin(), names.begin() + 1 + p), true);
  const double df_num = p, df_den = static_cast<double>(rows - 1 - 2 * p);

  TestResult r;
  r.name = "granger";
  r.statistic = ((restricted.ssr - unrestricted.ssr) / df_num) / (unrestricted.ssr / df_den);
  r.p_value = stats::f_sf(std::max(r.statistic, 0.0), df_num, df_den);
  decide_p(r);
  r.details = {{"lags", p}, {"ssr_restricted", restricted.ssr}, {"ssr_unrestricted", unrestricted.ssr},
               {"df_num", df_num}, {"df_den", df_den}};
  for (const auto& [label, s] : {std::pair{"cause", cause}, std::pair{"effect", effect}}) {
    try {
      if (!adf_test(s).rejects(0.05)) r.notes.push_back(std::string(label) + " series may be non-stationary (ADF not rejected at 5%)");
    } catch (const Error& e) {
      r.notes.push_back(std::string(label) + " stationarity not assessed: " + e.what());
    }
  }
  return r;
}

TestResult ljung_box(std::span<const double> e, int lags, int fitted_params) {
  const auto n = e.size();
  if (lags < 1 || n <= static_cast<std::size_t>(lags)) throw Error("short-series", "Ljung-Box needs more points than lags");
  double mean = 0.0;
  for (double v : e) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double v : e) denom += (v - mean) * (v - mean);
  if (denom <= 0.0) throw Error("zero-variance", "residuals are constant");
  double q = 0.0;
  for (int k = 1; k <= lags; ++k) {
    double num = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) num += (e[t] - mean) * (e[t - static_cast<std::size_t>(k)] - mean);
    const double rho = num / denom;
    q += rho * rho / static_cast<double>(n - static_cast<std::size_t>(k));
  }
  const double nn = static_cast<double>(n);
  TestResult r;
  r.name = "ljung-box";
  r.statistic = nn * (nn + 2.0) * q;
  const int dof = lags - fitted_params;
  if (dof > 0) r.p_value = stats::chi2_sf(r.statistic, dof);
  decide_p(r);
  r.details = {{"lags", lags}, {"dof", dof}};
  return r;
}

double durbin_watson(std::span<const double> e) {
  if (e.size() < 2) throw Error("short-series", "Durbin-Watson needs at least two residuals");
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < e.size(); ++t) {
    den += e[t] * e[t];
    if (t > 0) num += (e[t] - e[t - 1]) * (e[t] - e[t - 1]);
  }
  if (den <= 0.0) throw Error("zero-variance", "residuals are all zero");
  return num / den;
}

}  // namespace gridtrace::regress
