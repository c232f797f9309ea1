#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "gridtrace/baseline/distribution.hpp"
#include "gridtrace/baseline/probabilistic.hpp"
#include "gridtrace/error.hpp"
#include "gridtrace/ingest/quality.hpp"

namespace gridtrace::cli {

namespace {

struct IngestOptions {
  std::vector<std::string> inputs;
  std::string variable = "load";
  std::string rule = "interpolate";
  int max_gap = 3;
  double z = 5.0;
  int window_days = 7;
  bool no_outliers = false;
};

void run_ingest(const IngestOptions& o, const Context& ctx) {
  ingest::QualityRule rule;
  if (o.rule == "interpolate") rule.kind = ingest::RuleKind::gap_interpolate;
  else if (o.rule == "week") rule.kind = ingest::RuleKind::week_fill;
  else throw Error("bad-rule", "rule must be interpolate or week, got '" + o.rule + "'");
  rule.max_gap_hours = o.max_gap;
  rule.z_threshold = o.z;
  rule.window_days = o.window_days;
  rule.validate();

  std::vector<frame::WideFrame> frames;
  for (const auto& path : o.inputs) frames.push_back(load_frame(ctx, path, o.variable));
  ensure_out_dir(ctx);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    auto [repaired, report] = ingest::fill_missing(frames[i], rule);
    if (!o.no_outliers) {
      if (static_cast<std::size_t>(rule.window_days) < repaired.size()) {
        ingest::add_outlier_flags(report, repaired, ingest::detect_outliers(repaired, rule));
      } else {
        *ctx.err << "note: " << o.inputs[i] << " is shorter than the outlier window; screening skipped\n";
      }
    }
    std::ostringstream csv, jsonl;
    frame::write_wide_csv(csv, repaired);
    ingest::write_quality_jsonl(jsonl, report);
    const std::string base = stem(o.inputs[i]);
    write_text(ctx.out_dir / (base + ".repaired.csv"), csv.str());
    write_text(ctx.out_dir / (base + ".quality.jsonl"), jsonl.str());
    *ctx.out << o.inputs[i] << ": " << report.count(ingest::QualityAction::filled_interpolate) << " interpolated, "
             << report.count(ingest::QualityAction::filled_week_aligned) << " week-filled, "
             << report.count(ingest::QualityAction::flagged_outlier) << " flagged, "
             << report.count(ingest::QualityAction::left_missing) << " left missing\n";
  }
}

const std::vector<std::string> kMethods{"date", "week", "trend", "detrend", "backcast", "index", "prob"};

struct BaselineOptions {
  std::string method;
  std::string input;
  std::string variable = "load";
  int years_back = 1;
  std::string from, to, event;
  int ma_window = 168;
  std::string order;
  std::string index_window = "720";
  std::string level = "hourly";
  std::vector<std::string> covariates;
  std::vector<std::string> learners{"ridge:1"};
  std::string family = "backcast";
  bool no_lag = false;
  std::string output = "baseline.csv";
};

std::vector<frame::Date> target_dates(const frame::WideFrame& f, const BaselineOptions& o) {
  const frame::Date first = o.from.empty() ? f.dates().front() : frame::parse_date(o.from);
  const frame::Date last = o.to.empty() ? f.dates().back() : frame::parse_date(o.to);
  if (first > last) throw Error("bad-range", "--from is after --to");
  std::vector<frame::Date> out;
  for (frame::Date d = first; d <= last; d = frame::add_days(d, 1)) out.push_back(d);
  return out;
}

baseline::BaselineSeries restrict(baseline::BaselineSeries b, const BaselineOptions& o) {
  if (o.from.empty() && o.to.empty()) return b;
  const frame::Date first = o.from.empty() ? frame::Date{} : frame::parse_date(o.from);
  const frame::Date last = o.to.empty() ? frame::make_date(9999, 12, 31) : frame::parse_date(o.to);
  baseline::BaselineSeries out{b.method, {}, {}, b.meta};
  for (std::size_t i = 0; i < b.timestamps.size(); ++i) {
    if (b.timestamps[i].date >= first && b.timestamps[i].date <= last) {
      out.timestamps.push_back(b.timestamps[i]);
      out.values.push_back(b.values[i]);
    }
  }
  return out;
}

baseline::FeatureSet backcast_features(const BaselineOptions& o, const Context& ctx, const frame::SeriesView& target) {
  std::vector<baseline::NamedSeries> covs;
  for (const auto& c : o.covariates) {
    const auto [name, path] = split_pair(c);
    covs.push_back({name, frame::flatten(load_frame(ctx, path, name))});
  }
  baseline::FeatureOptions opt;
  opt.week_aligned_lag = !o.no_lag;
  return baseline::build_features(target.timestamps(), covs, o.no_lag ? nullptr : &target, opt);
}

baseline::BackcastWindow window_of(const BaselineOptions& o) {
  if (o.event.empty() || o.from.empty() || o.to.empty()) {
    throw Error("bad-spec", "method '" + o.method + "' needs --event, --from and --to");
  }
  return {frame::parse_date(o.event), frame::parse_date(o.from), frame::parse_date(o.to)};
}

void run_baseline(const BaselineOptions& o, const Context& ctx) {
  if (std::find(kMethods.begin(), kMethods.end(), o.method) == kMethods.end()) {
    std::string list;
    for (const auto& m : kMethods) list += (list.empty() ? "" : ", ") + m;
    throw Error("bad-method", "unknown method '" + o.method + "'; valid methods: " + list);
  }
  const auto f = load_frame(ctx, o.input, o.variable);
  const auto observed = frame::flatten(f);
  std::ostringstream csv;

  if (o.method == "date" || o.method == "week") {
    const auto targets = target_dates(f, o);
    const auto b = o.method == "date" ? baseline::date_aligned(f, o.years_back, targets)
                                      : baseline::week_aligned(f, o.years_back, targets);
    baseline::write_baseline_csv(csv, observed, b);
  } else if (o.method == "trend" || o.method == "detrend") {
    const frame::SeriesView trend = o.order.empty()
                                        ? baseline::trend_ma(observed, o.ma_window)
                                        : baseline::trend_model(observed, learners::ArmaOrder::parse(o.order)).fitted;
    const auto b = o.method == "trend" ? baseline::trend_baseline(trend, o.years_back)
                                       : baseline::detrend_baseline(observed, trend);
    baseline::write_baseline_csv(csv, observed, restrict(b, o));
  } else if (o.method == "backcast") {
    baseline::EnsembleSpec spec;
    for (std::size_t i = 0; i < o.learners.size(); ++i) spec.push_back(parse_learner(o.learners[i], ctx.seed + i));
    const auto b = baseline::backcast(backcast_features(o, ctx, observed), observed, spec, window_of(o));
    baseline::write_baseline_csv(csv, observed, b);
  } else if (o.method == "index") {
    const auto idx = baseline::fluctuation_index(observed, baseline::WindowSpec::parse(o.index_window));
    const auto level = frame::parse_aggregation_level(o.level);
    const auto b = baseline::index_baseline(idx, o.years_back, level);
    const auto obs = level == frame::AggregationLevel::hourly ? idx.index : frame::aggregate(idx.index, level).series;
    baseline::write_baseline_csv(csv, obs, restrict(b, o));
  } else {
    baseline::ProbabilisticSpec spec;
    spec.family = baseline::parse_family(o.family);
    spec.base = parse_learner(o.learners.front(), ctx.seed);
    const auto features = spec.family == baseline::ProbabilisticFamily::trend
                              ? baseline::trend_features(observed.timestamps(), observed.timestamps().front())
                              : backcast_features(o, ctx, observed);
    const auto pb = baseline::probabilistic_baseline(features, observed, spec, window_of(o));
    baseline::write_baseline_csv(csv, observed, pb);
  }
  ensure_out_dir(ctx);
  write_text(ctx.out_dir / o.output, csv.str());
  *ctx.out << "wrote " << (ctx.out_dir / o.output).string() << " (method " << o.method << ", seed " << ctx.seed << ")\n";
}

}  // namespace

void add_ingest(CLI::App& app, Context& ctx, Action& action) {
  auto o = std::make_shared<IngestOptions>();
  auto* sub = app.add_subcommand("ingest", "Validate, repair and screen wide-frame CSV files");
  sub->add_option("--input", o->inputs, "Wide CSV (date,0..23)")->required();
  sub->add_option("--variable", o->variable, "Variable label");
  sub->add_option("--rule", o->rule, "Gap repair: interpolate or week");
  sub->add_option("--max-gap", o->max_gap, "Longest gap (hours) to interpolate");
  sub->add_option("--z", o->z, "Outlier threshold in robust standard deviations");
  sub->add_option("--window-days", o->window_days, "Outlier median window (days)");
  sub->add_flag("--no-outliers", o->no_outliers, "Skip outlier screening");
  sub->callback([o, &ctx, &action] { action = [o, &ctx] { run_ingest(*o, ctx); }; });
}

void add_baseline(CLI::App& app, Context& ctx, Action& action) {
  auto o = std::make_shared<BaselineOptions>();
  auto* sub = app.add_subcommand("baseline", "Estimate a counterfactual baseline and write it as CSV");
  sub->add_option("--method", o->method, "date, week, trend, detrend, backcast, index or prob")->required();
  sub->add_option("--input", o->input, "Observed wide CSV")->required();
  sub->add_option("--variable", o->variable, "Variable label");
  sub->add_option("--years-back", o->years_back, "Years between target and source");
  sub->add_option("--from", o->from, "First target date");
  sub->add_option("--to", o->to, "Last target date");
  sub->add_option("--event", o->event, "Event start; training uses earlier dates");
  sub->add_option("--ma-window", o->ma_window, "Moving-average window (hours) for trend/detrend");
  sub->add_option("--order", o->order, "ARMA order p,d,q for trend/detrend instead of a moving average");
  sub->add_option("--index-window", o->index_window, "Fluctuation window: hours or 'month'");
  sub->add_option("--level", o->level, "Index baseline level: hourly, daily or monthly");
  sub->add_option("--covariate", o->covariates, "NAME=FILE covariate wide CSV (repeatable)");
  sub->add_option("--learner", o->learners, "ridge[:lambda] or mlp[:H1xH2[:epochs]] (repeatable)");
  sub->add_option("--family", o->family, "Probabilistic family: trend or backcast");
  sub->add_flag("--no-lag", o->no_lag, "Drop the week-aligned lag feature");
  sub->add_option("--output", o->output, "Output file name inside --out");
  sub->callback([o, &ctx, &action] { action = [o, &ctx] { run_baseline(*o, ctx); }; });
}

}  // namespace gridtrace::cli
