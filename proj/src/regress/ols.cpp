#include "gridtrace/regress/ols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridtrace/error.hpp"
#include "gridtrace/stats/distributions.hpp"

namespace gridtrace::regress {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string Term::name() const {
  switch (kind) {
    case Kind::intercept: return "intercept";
    case Kind::linear: return a;
    case Kind::quadratic: return a + "^2";
    case Kind::interaction: return a + ":" + b;
    case Kind::log: return "log(" + a + ")";
  }
  return a;
}

Term Term::parse(const std::string& raw) {
  const std::string t = trim(raw);
  if (t.empty()) throw Error("bad-spec", "empty term");
  if (t == "1" || t == "intercept") return {Kind::intercept, "", ""};
  if (t.rfind("log(", 0) == 0 && t.back() == ')') {
    const std::string inner = trim(t.substr(4, t.size() - 5));
    if (inner.empty()) throw Error("bad-spec", "empty log term");
    return {Kind::log, inner, ""};
  }
  if (t.size() > 2 && t.ends_with("^2")) return {Kind::quadratic, trim(t.substr(0, t.size() - 2)), ""};
  if (const auto c = t.find(':'); c != std::string::npos) {
    Term term{Kind::interaction, trim(t.substr(0, c)), trim(t.substr(c + 1))};
    if (term.a.empty() || term.b.empty()) throw Error("bad-spec", "malformed interaction '" + t + "'");
    return term;
  }
  return {Kind::linear, t, ""};
}

OLSSpec OLSSpec::parse(const std::string& formula) {
  const auto tilde = formula.find('~');
  if (tilde == std::string::npos) throw Error("bad-spec", "formula needs 'response ~ terms'");
  OLSSpec spec;
  spec.response = trim(formula.substr(0, tilde));
  if (spec.response.empty()) throw Error("bad-spec", "missing response");
  std::string rest = formula.substr(tilde + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto plus = rest.find('+', start);
    spec.terms.push_back(Term::parse(rest.substr(start, plus == std::string::npos ? std::string::npos : plus - start)));
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  spec.validate();
  return spec;
}

std::string OLSSpec::formula() const {
  std::string f = response + " ~ ";
  for (std::size_t i = 0; i < terms.size(); ++i) f += (i ? " + " : "") + (terms[i].kind == Term::Kind::intercept ? std::string("1") : terms[i].name());
  return f;
}

bool OLSSpec::has_intercept() const {
  return std::any_of(terms.begin(), terms.end(), [](const Term& t) { return t.kind == Term::Kind::intercept; });
}

void OLSSpec::validate() const {
  if (terms.empty()) throw Error("bad-spec", "no terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const bool same = terms[i] == terms[j] || (terms[i].kind == Term::Kind::interaction &&
                                                 terms[j].kind == Term::Kind::interaction &&
                                                 terms[i].a == terms[j].b && terms[i].b == terms[j].a);
      if (same) throw Error("bad-spec", "duplicate term '" + terms[i].name() + "'");
    }
  }
}

const Coefficient& OLSReport::coefficient(const std::string& term) const {
  for (const auto& c : coefficients) {
    if (c.term == term) return c;
  }
  throw Error("unknown-column", "no coefficient named '" + term + "'");
}

Eigen::VectorXd OLSReport::estimates() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(coefficients.size()));
  for (std::size_t i = 0; i < coefficients.size(); ++i) v[static_cast<Eigen::Index>(i)] = coefficients[i].estimate;
  return v;
}

Eigen::MatrixXd design_matrix(const OLSSpec& spec, const learners::FeatureMatrix& data) {
  spec.validate();
  const Eigen::Index n = data.rows();
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(spec.terms.size()));
  for (std::size_t j = 0; j < spec.terms.size(); ++j) {
    const Term& t = spec.terms[j];
    auto col = x.col(static_cast<Eigen::Index>(j));
    switch (t.kind) {
      case Term::Kind::intercept: col.setOnes(); break;
      case Term::Kind::linear: col = data.column(t.a); break;
      case Term::Kind::quadratic: col = data.column(t.a).array().square().matrix(); break;
      case Term::Kind::interaction: col = data.column(t.a).cwiseProduct(data.column(t.b)); break;
      case Term::Kind::log: {
        const Eigen::VectorXd v = data.column(t.a);
        if ((v.array() <= 0.0).any()) throw Error("non-positive-log", "log term needs positive '" + t.a + "'");
        col = v.array().log().matrix();
        break;
      }
    }
  }
  return x;
}

OLSReport fit_ols(const OLSSpec& spec, const learners::FeatureMatrix& data) {
  const Eigen::MatrixXd x = design_matrix(spec, data);
  const Eigen::VectorXd y = data.column(spec.response);
  std::vector<std::string> names;
  for (const auto& t : spec.terms) names.push_back(t.name());
  OLSReport r = fit_ols(x, y, names, spec.has_intercept());
  r.spec = spec;
  return r;
}

OLSReport fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                  bool intercept) {
  const Eigen::Index n = x.rows(), k = x.cols();
  if (static_cast<Eigen::Index>(names.size()) != k || y.size() != n) {
    throw Error("misaligned", "design, response and names disagree in size");
  }
  if (n <= k) throw Error("short-series", std::to_string(n) + " observations for " + std::to_string(k) + " terms");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    std::string offenders;
    for (Eigen::Index i = qr.rank(); i < k; ++i) {
      offenders += (offenders.empty() ? "" : ", ") + names[static_cast<std::size_t>(qr.colsPermutation().indices()[i])];
    }
    throw Error("collinear", "design is rank deficient; dependent terms: " + offenders);
  }
  const Eigen::VectorXd beta = qr.solve(y);

  OLSReport r;
  r.observations = static_cast<std::size_t>(n);
  r.df_resid = static_cast<std::size_t>(n - k);
  r.fitted = x * beta;
  r.residuals = y - r.fitted;
  r.ssr = r.residuals.squaredNorm();
  r.sigma2 = r.ssr / static_cast<double>(n - k);

  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd rt = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv = rt.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd cov_perm = rinv * rinv.transpose();
  const auto& perm = qr.colsPermutation().indices();
  Eigen::VectorXd var(k);
  for (Eigen::Index i = 0; i < k; ++i) var[perm[i]] = cov_perm(i, i);

  for (Eigen::Index j = 0; j < k; ++j) {
    Coefficient c;
    c.term = names[static_cast<std::size_t>(j)];
    c.estimate = beta[j];
    c.std_error = std::sqrt(r.sigma2 * var[j]);
    if (c.std_error > 0.0) {
      c.t_stat = c.estimate / c.std_error;
      c.p_value = stats::student_t_two_sided(c.t_stat, static_cast<double>(n - k));
    } else {
      c.t_stat = c.estimate == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
      c.p_value = c.estimate == 0.0 ? 1.0 : 0.0;
    }
    r.coefficients.push_back(c);
  }

  const double sst = intercept ? (y.array() - y.mean()).square().sum() : y.squaredNorm();
  r.r2 = sst > 0.0 ? std::clamp(1.0 - r.ssr / sst, 0.0, 1.0) : 1.0;
  const double c0 = intercept ? 1.0 : 0.0;
  r.adj_r2 = 1.0 - (1.0 - r.r2) * (static_cast<double>(n) - c0) / static_cast<double>(n - k);
  const double df_model = static_cast<double>(k) - c0;
  if (df_model > 0.0) {
    if (r.ssr > 0.0) {
      r.f_stat = ((sst - r.ssr) / df_model) / r.sigma2;
      r.f_p_value = stats::f_sf(*r.f_stat, df_model, static_cast<double>(n - k));
    } else {
      r.f_stat = std::numeric_limits<double>::infinity();
      r.f_p_value = 0.0;
    }
  }
  r.jb_stat = jarque_bera(r.residuals);
  r.jb_p_value = stats::chi2_sf(r.jb_stat, 2.0);
  return r;
}

double jarque_bera(const Eigen::VectorXd& e) {
  const double n = static_cast<double>(e.size());
  if (e.size() < 2) return 0.0;
  const Eigen::ArrayXd c = e.array() - e.mean();
  const double m2 = c.square().mean();
  if (m2 <= 0.0) return 0.0;
  const double skew = c.cube().mean() / std::pow(m2, 1.5);
  const double kurt = c.square().square().mean() / (m2 * m2);
  return n / 6.0 * (skew * skew + (kurt - 3.0) * (kurt - 3.0) / 4.0);
}

}  // namespace gridtrace::regress
