#include "gridtrace/regress/report.hpp"

#include <cmath>
#include <cstdio>

namespace gridtrace::regress {

using nlohmann::ordered_json;

namespace {

// JSON has no infinities; they are written as strings.
ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

std::string fmt(double v, const char* spec = "%12.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) { return s.size() >= width ? s : s + std::string(width - s.size(), ' '); }

void coefficient_table(std::string& out, const std::vector<Coefficient>& coefs) {
  std::size_t width = 10;
  for (const auto& c : coefs) width = std::max(width, c.term.size() + 2);
  out += pad("", width) + "        coef         std           t       P>|t|\n";
  for (const auto& c : coefs) {
    out += pad(c.term, width) + fmt(c.estimate) + fmt(c.std_error) + fmt(c.t_stat, "%12.3f") + fmt(c.p_value, "%12.3f") + "\n";
  }
}

}  // namespace

ordered_json to_json(const TestResult& t) {
  ordered_json j;
  j["test"] = t.name;
  j["statistic"] = number(t.statistic);
  j["p_value"] = t.p_value ? number(*t.p_value) : ordered_json(nullptr);
  if (t.critical) j["critical"] = {{"1%", (*t.critical)[0]}, {"5%", (*t.critical)[1]}, {"10%", (*t.critical)[2]}};
  j["reject"] = {{"1%", t.reject[0]}, {"5%", t.reject[1]}, {"10%", t.reject[2]}};
  ordered_json d = ordered_json::object();
  for (const auto& [k, v] : t.details) d[k] = number(v);
  j["details"] = d;
  j["notes"] = t.notes;
  return j;
}

ordered_json to_json(const OLSReport& r) {
  ordered_json j;
  if (!r.spec.terms.empty()) j["formula"] = r.spec.formula();
  ordered_json coefs = ordered_json::array();
  for (const auto& c : r.coefficients) {
    coefs.push_back({{"term", c.term}, {"estimate", number(c.estimate)}, {"std_error", number(c.std_error)},
                     {"t", number(c.t_stat)}, {"p_value", number(c.p_value)}});
  }
  j["coefficients"] = coefs;
  j["observations"] = r.observations;
  j["df_resid"] = r.df_resid;
  j["r2"] = r.r2;
  j["adj_r2"] = r.adj_r2;
  j["f_stat"] = r.f_stat ? number(*r.f_stat) : ordered_json(nullptr);
  j["f_p_value"] = r.f_p_value ? number(*r.f_p_value) : ordered_json(nullptr);
  j["jarque_bera"] = {{"statistic", r.jb_stat}, {"p_value", r.jb_p_value}};
  j["sigma2"] = r.sigma2;
  j["residuals"] = std::vector<double>(r.residuals.data(), r.residuals.data() + r.residuals.size());
  return j;
}

ordered_json to_json(const VarReport& r, const std::vector<Eigen::MatrixXd>& irf, const std::vector<Eigen::MatrixXd>& fevd) {
  const VarModel& m = r.model;
  ordered_json j;
  j["variables"] = m.names;
  j["order"] = m.order;
  j["intercept"] = std::vector<double>(m.intercept.data(), m.intercept.data() + m.intercept.size());
  ordered_json lags = ordered_json::array();
  for (const auto& a : m.lags) lags.push_back(matrix_json(a));
  j["lags"] = lags;
  j["sigma"] = matrix_json(m.sigma);
  j["spectral_radius"] = m.spectral_radius();
  ordered_json eqs = ordered_json::array();
  for (const auto& e : r.equations) {
    eqs.push_back({{"variable", e.variable}, {"r2", e.r2}, {"residual_adf", to_json(e.residual_adf)},
                   {"ljung_box", to_json(e.ljung_box)}, {"durbin_watson", e.durbin_watson}});
  }
  j["equations"] = eqs;
  ordered_json pre = ordered_json::array();
  for (const auto& t : r.pre_tests) pre.push_back(to_json(t));
  j["pre_tests"] = pre;
  if (!irf.empty()) {
    ordered_json a = ordered_json::array();
    for (const auto& x : irf) a.push_back(matrix_json(x));
    j["irf"] = a;
  }
  if (!fevd.empty()) {
    ordered_json a = ordered_json::array();
    for (const auto& x : fevd) a.push_back(matrix_json(x));
    j["fevd"] = a;
  }
  j["notes"] = r.notes;
  return j;
}

ordered_json to_json(const RobustnessSummary& s) {
  return {{"epsilon", s.epsilon},
          {"trials", s.inflation.size()},
          {"median_inflation", s.median_inflation},
          {"max_inflation", s.max_inflation},
          {"unstable_trials", s.unstable_trials},
          {"inflation", s.inflation}};
}

std::string render_text(const OLSReport& r) {
  std::string out;
  if (!r.spec.terms.empty()) out += "OLS  " + r.spec.formula() + "\n";
  coefficient_table(out, r.coefficients);
  out += "observations " + std::to_string(r.observations) + "   R-squared" + fmt(r.r2, "%8.4f") + "   adj. R-squared" + fmt(r.adj_r2, "%8.4f") + "\n";
  if (r.f_stat) out += "F-statistic" + fmt(*r.f_stat, "%12.4g") + "   Prob (F)" + fmt(*r.f_p_value, "%10.3g") + "\n";
  out += "Jarque-Bera" + fmt(r.jb_stat, "%12.4g") + "   Prob (JB)" + fmt(r.jb_p_value, "%10.3g") + "\n";
  return out;
}

std::string render_text(const VarReport& r) {
  const VarModel& m = r.model;
  std::string out = "VAR(" + std::to_string(m.order) + ")  spectral radius" + fmt(m.spectral_radius(), "%8.4f") + "\n";
  for (std::size_t eq = 0; eq < m.names.size(); ++eq) {
    out += "\nequation " + m.names[eq] + "\n";
    std::size_t width = 10;
    for (int i = 0; i < m.order; ++i)
      for (const auto& nm : m.names) width = std::max(width, nm.size() + 5);
    out += pad("intercept", width) + fmt(m.intercept[static_cast<Eigen::Index>(eq)]) + "\n";
    for (int i = 0; i < m.order; ++i) {
      for (std::size_t v = 0; v < m.names.size(); ++v) {
        out += pad(m.names[v] + ".L" + std::to_string(i + 1), width) +
               fmt(m.lags[static_cast<std::size_t>(i)](static_cast<Eigen::Index>(eq), static_cast<Eigen::Index>(v))) + "\n";
      }
    }
    if (eq < r.equations.size()) {
      const auto& d = r.equations[eq];
      out += "residual ADF" + fmt(d.residual_adf.statistic, "%10.3f") + "   Ljung-Box p" +
             fmt(d.ljung_box.p_value.value_or(NAN), "%8.3f") + "   Durbin-Watson" + fmt(d.durbin_watson, "%8.3f") + "\n";
    }
  }
  for (const auto& n : r.notes) out += "note: " + n + "\n";
  return out;
}

}  // namespace gridtrace::regress
