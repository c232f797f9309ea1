#include <map>
#include <memory>

#include "commands.hpp"
#include "gridtrace/error.hpp"
#include "gridtrace/regress/report.hpp"
#include "gridtrace/studies/demand.hpp"
#include "gridtrace/studies/forecast.hpp"
#include "gridtrace/studies/price.hpp"
#include "gridtrace/viz/plot.hpp"

namespace gridtrace::cli {

using nlohmann::ordered_json;

namespace {

struct StudyOptions {
  std::string name;
  std::string demand, baseline_csv, solar, input, shares, factors, temperature, mobility;
  std::string month;
  std::string from, to, event, study_start;
  std::string index_window = "720";
  double threshold = studies::kExtremeThreshold;
  std::string bucket = "weekly";
  std::string order = "2,0,1";
  std::string learner = "ridge:1";
  std::string calibration_from = "2020-03-07", calibration_to = "2020-03-20";
  std::string normal_from = "2020-01-01", normal_to = "2020-03-20";
  std::string lockdown_from = "2020-03-21", lockdown_to = "2020-06-30";
};

std::pair<int, unsigned> parse_month(const std::string& text) {
  const auto d = frame::parse_date(text + "-01");
  return {frame::year_of(d), frame::month_of(d)};
}

baseline::BaselineSeries read_point_baseline(const std::string& path) {
  const auto t = load_table(path);
  baseline::BaselineSeries b;
  b.method = "file";
  for (const auto& l : t.labels) b.timestamps.push_back(parse_label(l));
  b.values = t.column("baseline");
  return b;
}

baseline::ProbabilisticBaseline read_prob_baseline(const std::string& path) {
  const auto t = load_table(path);
  baseline::ProbabilisticBaseline pb;
  const char* names[5] = {"q10", "q25", "q50", "q75", "q90"};
  for (std::size_t q = 0; q < 5; ++q) {
    const auto& col = t.column(names[q]);
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (!col[i]) throw Error("missing-values", std::string("empty ") + names[q] + " cell in " + path);
      pb.tracks[q].push_back(*col[i]);
    }
  }
  for (const auto& l : t.labels) pb.timestamps.push_back(parse_label(l));
  return pb;
}

ordered_json month_json(const studies::MonthlyReduction& m) {
  ordered_json j{{"year", m.year}, {"month", m.month}, {"alpha", m.alpha}, {"days", ordered_json::array()}};
  for (const auto& d : m.days) {
    j["days"].push_back({{"date", frame::format_date(d.date)}, {"baseline", d.baseline}, {"observed", d.observed},
                         {"reduction", d.reduction}});
  }
  return j;
}

std::vector<std::pair<int, unsigned>> months_of(const frame::WideFrame& f) {
  std::vector<std::pair<int, unsigned>> out;
  for (const auto& d : f.dates()) {
    std::pair<int, unsigned> ym{frame::year_of(d), frame::month_of(d)};
    if (out.empty() || out.back() != ym) out.push_back(ym);
  }
  return out;
}

ordered_json series_json(const frame::SeriesView& s) {
  ordered_json j = ordered_json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    j.push_back({{"timestamp", frame::format_timestamp(s.timestamps()[i])}, {"value", cell_json(s.values()[i])}});
  }
  return j;
}

void require(const std::string& value, const std::string& flag, const std::string& study) {
  if (value.empty()) throw Error("bad-spec", "study " + study + " needs " + flag);
}

ordered_json peak_demand(const StudyOptions& o, const Context& ctx) {
  require(o.demand, "--demand", o.name);
  require(o.baseline_csv, "--baseline-csv", o.name);
  const auto demand = load_frame(ctx, o.demand, "demand");
  const auto b = read_point_baseline(o.baseline_csv);
  ordered_json j{{"study", "peak-demand"}, {"months", ordered_json::array()}};
  if (!o.month.empty()) {
    const auto [y, m] = parse_month(o.month);
    j["months"].push_back(month_json(studies::peak_demand_reduction(demand, b, y, m)));
  } else {
    for (const auto& m : studies::peak_demand_report(demand, b)) j["months"].push_back(month_json(m));
  }
  for (const auto& m : j["months"]) *ctx.out << m["year"] << "-" << m["month"] << ": alpha " << m["alpha"] << "%\n";
  return j;
}

ordered_json prob_peak(const StudyOptions& o, const Context& ctx) {
  require(o.demand, "--demand", o.name);
  require(o.baseline_csv, "--baseline-csv", o.name);
  const auto demand = load_frame(ctx, o.demand, "demand");
  const auto pb = read_prob_baseline(o.baseline_csv);
  std::vector<std::pair<int, unsigned>> months;
  if (!o.month.empty()) months.push_back(parse_month(o.month));
  else months = months_of(demand);
  ordered_json j{{"study", "prob-peak"}, {"levels", baseline::kQuantileLevels}, {"months", ordered_json::array()}};
  for (const auto& [y, m] : months) {
    try {
      const auto r = studies::probabilistic_peak_reduction(demand, pb, y, m);
      j["months"].push_back({{"year", y}, {"month", m}, {"alpha", r.alpha}, {"width_50", r.width_50},
                             {"width_80", r.width_80}, {"crosses_zero", r.crosses_zero}});
    } catch (const Error& e) {
      if (!o.month.empty() || e.code() != "empty-month") throw;
    }
  }
  return j;
}

ordered_json extreme_price(const StudyOptions& o, const Context& ctx) {
  require(o.input, "--input", o.name);
  const auto price = frame::flatten(load_frame(ctx, o.input, "price"));
  const auto c = studies::extreme_price_count(price, baseline::WindowSpec::parse(o.index_window), o.threshold,
                                              studies::parse_bucket(o.bucket));
  ordered_json j{{"study", "extreme-price"}, {"bucket", studies::to_string(c.bucket)}, {"threshold", c.threshold},
                 {"window", baseline::WindowSpec::parse(o.index_window).describe()}, {"flagged", c.flagged},
                 {"indexed", c.indexed}, {"buckets", ordered_json::array()}};
  for (const auto& b : c.buckets) {
    j["buckets"].push_back({{"start", frame::format_date(b.start)}, {"flagged", b.flagged}, {"indexed", b.indexed}});
  }
  *ctx.out << c.flagged << " of " << c.indexed << " indexed hours at or above " << c.threshold << "\n";
  return j;
}

ordered_json duck(const StudyOptions& o, const Context& ctx) {
  require(o.demand, "--demand", o.name);
  require(o.solar, "--solar", o.name);
  const auto demand = load_frame(ctx, o.demand, "demand");
  const auto solar = load_frame(ctx, o.solar, "solar");
  const frame::Date first = o.from.empty() ? demand.dates().front() : frame::parse_date(o.from);
  const frame::Date last = o.to.empty() ? demand.dates().back() : frame::parse_date(o.to);
  const auto r = studies::duck_curve(demand, solar, first, last);
  viz::PlotData plot;
  plot.title = "Residual demand by hour";
  plot.x_label = "hour";
  plot.y_label = demand.meta().unit;
  viz::PlotSeries s{"residual demand", {}};
  for (int h = 0; h < 24; ++h) {
    plot.x.push_back(h);
    s.y.emplace_back(r.profile[static_cast<std::size_t>(h)]);
  }
  plot.series.push_back(std::move(s));
  ensure_out_dir(ctx);
  write_text(ctx.out_dir / "study_duck-curve.plot.json", viz::to_json(plot).dump(2) + "\n");
  viz::render_svg(plot, ctx.out_dir / "study_duck-curve.svg");
  *ctx.out << "ramp " << r.max_ramp << " at hour " << r.ramp_hour << ", range " << r.range << "\n";
  return {{"study", "duck-curve"}, {"from", frame::format_date(first)}, {"to", frame::format_date(last)},
          {"days", r.days}, {"profile", r.profile}, {"max_ramp", r.max_ramp}, {"ramp_hour", r.ramp_hour},
          {"range", r.range}};
}

ordered_json renewable(const StudyOptions& o, const Context& ctx) {
  require(o.shares, "--shares", o.name);
  require(o.study_start, "--study-start", o.name);
  const auto t = load_table(o.shares);
  const auto beta = studies::renewable_share(table_series(t, "hydro"), table_series(t, "solar"), table_series(t, "wind"));
  const auto r = studies::renewable_baseline(beta, frame::parse_date(o.study_start), learners::ArmaOrder::parse(o.order));
  ordered_json base = ordered_json::array();
  for (std::size_t i = 0; i < r.baseline.timestamps.size(); ++i) {
    base.push_back({{"timestamp", frame::format_timestamp(r.baseline.timestamps[i])}, {"value", cell_json(r.baseline.values[i])}});
  }
  *ctx.out << "observed mean " << r.observed_mean << "%, baseline mean " << r.baseline_mean << "%\n";
  return {{"study", "renewable"}, {"order", r.model.order.describe()}, {"share", series_json(beta)},
          {"ar", std::vector<double>(r.model.ar.begin(), r.model.ar.end())},
          {"ma", std::vector<double>(r.model.ma.begin(), r.model.ma.end())}, {"mean", r.model.mean}, {"sigma2", r.model.sigma2},
          {"low_sample", r.model.low_sample}, {"baseline", base}, {"observed_mean", r.observed_mean},
          {"baseline_mean", r.baseline_mean}};
}

ordered_json price_regression(const StudyOptions& o, const Context& ctx) {
  require(o.input, "--input", o.name);
  require(o.factors, "--factors", o.name);
  require(o.event, "--event", o.name);
  const auto window = baseline::WindowSpec::parse(o.index_window);
  const auto idx = baseline::fluctuation_index(frame::flatten(load_frame(ctx, o.input, "price")), window);
  const std::size_t n = window.kind == baseline::WindowSpec::Kind::trailing ? static_cast<std::size_t>(window.hours) : 720;
  const auto logit = studies::loi(studies::daily_index(idx), n);
  const auto t = load_table(o.factors);
  const studies::PriceStudyInputs in{logit.values, table_series(t, "gas"), table_series(t, "cases"),
                                     studies::pandemic_dummy(logit.values.timestamps(), frame::parse_date(o.event))};
  const auto dummy = studies::price_regression_dummy(in);
  const auto cases = studies::price_regression_cases(in);
  *ctx.out << regress::render_text(dummy.ols) << regress::render_text(cases.ols);
  auto flags = [](const studies::PriceRegression& r) {
    ordered_json j = ordered_json::object();
    for (std::size_t i = 0; i < r.significant.size(); ++i) j[r.ols.coefficients[i].term] = static_cast<bool>(r.significant[i]);
    return j;
  };
  return {{"study", "price-regression"}, {"clamped_days", logit.clamped.size()},
          {"dummy_model", regress::to_json(dummy.ols)}, {"dummy_significant_5pct", flags(dummy)},
          {"cases_model", regress::to_json(cases.ols)}, {"cases_significant_5pct", flags(cases)}};
}

ordered_json mobility(const StudyOptions& o, const Context& ctx) {
  require(o.demand, "--demand", o.name);
  require(o.temperature, "--temperature", o.name);
  require(o.mobility, "--mobility", o.name);
  const auto demand = frame::flatten(load_frame(ctx, o.demand, "demand"));
  const auto temp = frame::flatten(load_frame(ctx, o.temperature, "temperature"));
  std::vector<frame::Cell> sq;
  for (const auto& v : temp.values()) sq.push_back(v ? frame::Cell{*v * *v} : frame::Cell{});
  baseline::FeatureOptions opt;
  opt.week_aligned_lag = false;
  studies::EnhancementInputs in;
  in.features = baseline::build_features(demand.timestamps(),
                                         {{"temperature", temp}, {"temperature_sq", frame::SeriesView(temp.timestamps(), sq)}},
                                         nullptr, opt);
  in.demand = demand;
  const auto t = load_table(o.mobility);
  for (const auto& name : t.names) in.enhancers.push_back({name, table_series(t, name)});
  in.base = parse_learner(o.learner, ctx.seed);
  in.event = frame::parse_date(o.event.empty() ? o.calibration_from : o.event);
  in.calibration = {frame::parse_date(o.calibration_from), frame::parse_date(o.calibration_to)};
  in.normal = {frame::parse_date(o.normal_from), frame::parse_date(o.normal_to)};
  in.lockdown = {frame::parse_date(o.lockdown_from), frame::parse_date(o.lockdown_to)};
  const auto r = studies::mobility_enhanced_forecast(in);
  ordered_json j{{"study", "mobility"}, {"scores", ordered_json::array()}};
  for (const auto& s : r.scores) {
    j["scores"].push_back({{"model", s.model}, {"normal_mape", s.normal_mape ? ordered_json(*s.normal_mape) : ordered_json(nullptr)},
                           {"lockdown_mape", s.lockdown_mape}, {"improvement", s.improvement}, {"correction", s.correction}});
    *ctx.out << s.model << ": lockdown MAPE " << s.lockdown_mape << "%\n";
  }
  return j;
}

const std::map<std::string, ordered_json (*)(const StudyOptions&, const Context&)> kStudies{
    {"peak-demand", peak_demand}, {"prob-peak", prob_peak}, {"extreme-price", extreme_price}, {"duck-curve", duck},
    {"renewable", renewable}, {"price-regression", price_regression}, {"mobility", mobility}};

void run_study(const StudyOptions& o, const Context& ctx) {
  const auto it = kStudies.find(o.name);
  if (it == kStudies.end()) {
    std::string list;
    for (const auto& [k, f] : kStudies) list += (list.empty() ? "" : ", ") + k;
    throw Error("bad-spec", "unknown study '" + o.name + "'; valid studies: " + list);
  }
  auto j = it->second(o, ctx);
  ensure_out_dir(ctx);
  write_json(ctx, ctx.out_dir / ("study_" + o.name + ".json"), std::move(j));
}

}  // namespace

void add_study(CLI::App& app, Context& ctx, Action& action) {
  auto o = std::make_shared<StudyOptions>();
  auto* sub = app.add_subcommand("study", "Run an empirical study recipe and write a JSON report");
  sub->add_option("name", o->name,
                  "peak-demand, prob-peak, extreme-price, duck-curve, renewable, price-regression or mobility")
      ->required();
  sub->add_option("--demand", o->demand, "Demand wide CSV");
  sub->add_option("--baseline-csv", o->baseline_csv, "Baseline CSV written by the baseline command");
  sub->add_option("--solar", o->solar, "Solar generation wide CSV");
  sub->add_option("--input", o->input, "Price wide CSV");
  sub->add_option("--shares", o->shares, "Monthly table with hydro, solar and wind percentages");
  sub->add_option("--factors", o->factors, "Daily table with gas and cases columns");
  sub->add_option("--temperature", o->temperature, "Temperature wide CSV");
  sub->add_option("--mobility", o->mobility, "Daily table of indicators (each column becomes a correction)");
  sub->add_option("--month", o->month, "YYYY-MM");
  sub->add_option("--from", o->from, "Period start");
  sub->add_option("--to", o->to, "Period end");
  sub->add_option("--event", o->event, "Event date");
  sub->add_option("--study-start", o->study_start, "First study month (YYYY-MM-DD)");
  sub->add_option("--index-window", o->index_window, "Fluctuation window: hours or 'month'");
  sub->add_option("--threshold", o->threshold, "Extreme index threshold");
  sub->add_option("--bucket", o->bucket, "weekly or monthly");
  sub->add_option("--order", o->order, "ARMA order p,d,q");
  sub->add_option("--learner", o->learner, "Base forecast learner");
  sub->add_option("--calibration-from", o->calibration_from, "Residual calibration start");
  sub->add_option("--calibration-to", o->calibration_to, "Residual calibration end");
  sub->add_option("--normal-from", o->normal_from, "Normal window start");
  sub->add_option("--normal-to", o->normal_to, "Normal window end");
  sub->add_option("--lockdown-from", o->lockdown_from, "Lockdown window start");
  sub->add_option("--lockdown-to", o->lockdown_to, "Lockdown window end");
  sub->callback([o, &ctx, &action] { action = [o, &ctx] { run_study(*o, ctx); }; });
}

}  // namespace gridtrace::cli
