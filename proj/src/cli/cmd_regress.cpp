#include <sstream>

#include "commands.hpp"
#include "gridtrace/error.hpp"
#include "gridtrace/regress/report.hpp"

namespace gridtrace::cli {

namespace {

struct RegressOptions {
  std::string kind;
  std::string input;
  std::string formula;
  std::vector<std::string> columns;
  int order = 1;
  int horizon = 10;
  double epsilon = 0.05;
  int trials = 100;
  std::string column, cause, effect, x, y;
  std::string regression = "c";
  std::optional<int> lags;
};

/// Rows where every listed column is present.
Eigen::MatrixXd complete_rows(const frame::Table& t, const std::vector<std::string>& names) {
  std::vector<const std::vector<frame::Cell>*> cols;
  for (const auto& n : names) cols.push_back(&t.column(n));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < t.labels.size(); ++i) {
    std::vector<double> r;
    for (const auto* c : cols) {
      if (!(*c)[i]) break;
      r.push_back(*(*c)[i]);
    }
    if (r.size() == cols.size()) rows.push_back(std::move(r));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

std::vector<double> dense(const frame::Table& t, const std::string& name) {
  const Eigen::VectorXd v = complete_rows(t, {name}).col(0);
  return {v.data(), v.data() + v.size()};
}

regress::AdfRegression parse_regression(const std::string& s) {
  if (s == "n") return regress::AdfRegression::none;
  if (s == "c") return regress::AdfRegression::constant;
  if (s == "ct") return regress::AdfRegression::constant_trend;
  throw Error("bad-spec", "regression must be n, c or ct");
}

void run_regress(const RegressOptions& o, const Context& ctx) {
  const auto table = load_table(o.input);
  nlohmann::ordered_json j;
  if (o.kind == "ols") {
    if (o.formula.empty()) throw Error("bad-spec", "ols needs --formula");
    const auto spec = regress::OLSSpec::parse(o.formula);
    std::vector<std::string> used{spec.response};
    for (const auto& term : spec.terms) {
      for (const auto& v : {term.a, term.b}) {
        if (!v.empty() && std::find(used.begin(), used.end(), v) == used.end()) used.push_back(v);
      }
    }
    const auto report = regress::fit_ols(spec, learners::FeatureMatrix(used, complete_rows(table, used)));
    j = regress::to_json(report);
    *ctx.out << regress::render_text(report);
  } else if (o.kind == "var") {
    const auto names = o.columns.empty() ? table.names : o.columns;
    const auto report = regress::fit_var(names, complete_rows(table, names), o.order);
    const auto irf = regress::impulse_response(report.model, o.horizon);
    const auto decomposition = regress::fevd(report.model, o.horizon);
    j = regress::to_json(report, irf, decomposition);
    j["robustness"] = regress::to_json(regress::robustness_test(report.model, o.epsilon, o.trials, ctx.seed));
    *ctx.out << regress::render_text(report);
  } else if (o.kind == "adf") {
    regress::AdfOptions opt;
    opt.regression = parse_regression(o.regression);
    opt.lags = o.lags;
    j = regress::to_json(regress::adf_test(dense(table, o.column), opt));
  } else if (o.kind == "granger") {
    const auto m = complete_rows(table, {o.cause, o.effect});
    const Eigen::VectorXd c = m.col(0), e = m.col(1);
    j = regress::to_json(regress::granger_test({c.data(), static_cast<std::size_t>(c.size())},
                                               {e.data(), static_cast<std::size_t>(e.size())}, o.lags.value_or(1)));
  } else if (o.kind == "coint") {
    const auto m = complete_rows(table, {o.x, o.y});
    const Eigen::VectorXd a = m.col(0), b = m.col(1);
    j = regress::to_json(regress::cointegration_test({a.data(), static_cast<std::size_t>(a.size())},
                                                     {b.data(), static_cast<std::size_t>(b.size())}));
  } else {
    throw Error("bad-spec", "unknown regression '" + o.kind + "'; valid: ols, var, adf, granger, coint");
  }
  if (o.kind != "ols" && o.kind != "var") *ctx.out << j.dump(2) << "\n";
  ensure_out_dir(ctx);
  write_json(ctx, ctx.out_dir / ("regress_" + o.kind + ".json"), std::move(j));
}

}  // namespace

void add_regress(CLI::App& app, Context& ctx, Action& action) {
  auto o = std::make_shared<RegressOptions>();
  auto* sub = app.add_subcommand("regress", "OLS, VAR and time-series tests on a column table");
  sub->add_option("kind", o->kind, "ols, var, adf, granger or coint")->required();
  sub->add_option("--input", o->input, "CSV table: label column then numeric columns")->required();
  sub->add_option("--formula", o->formula, "OLS formula, e.g. 'y ~ 1 + x + x^2 + x:z'");
  sub->add_option("--columns", o->columns, "VAR variables (default: all columns)")->delimiter(',');
  sub->add_option("--order", o->order, "VAR order");
  sub->add_option("--horizon", o->horizon, "IRF/FEVD horizon");
  sub->add_option("--epsilon", o->epsilon, "Robustness perturbation size");
  sub->add_option("--trials", o->trials, "Robustness trials");
  sub->add_option("--column", o->column, "ADF series");
  sub->add_option("--regression", o->regression, "ADF deterministic terms: n, c or ct");
  sub->add_option("--lags", o->lags, "ADF lag count (default: AIC) or Granger order");
  sub->add_option("--cause", o->cause, "Granger cause column");
  sub->add_option("--effect", o->effect, "Granger effect column");
  sub->add_option("--x", o->x, "Cointegration regressor column");
  sub->add_option("--y", o->y, "Cointegration response column");
  sub->callback([o, &ctx, &action] { action = [o, &ctx] { run_regress(*o, ctx); }; });
}

}  // namespace gridtrace::cli
