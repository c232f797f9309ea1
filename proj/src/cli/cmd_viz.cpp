#include <fstream>
#include <memory>

#include "commands.hpp"
#include "gridtrace/error.hpp"
#include "gridtrace/viz/plot.hpp"

namespace gridtrace::cli {

namespace {

struct VizOptions {
  std::string kind;
  std::vector<std::string> inputs;
  std::vector<std::string> categories;
  std::string total;
  std::string level = "hourly";
  int bins = 20;
  std::vector<std::string> events;
  std::string plot_json;
  std::string title;
  std::string output;
};

frame::SeriesView load_trace(const Context& ctx, const std::string& path, const std::string& name,
                             frame::AggregationLevel level) {
  const auto f = load_frame(ctx, path, name);
  return level == frame::AggregationLevel::hourly ? frame::flatten(f) : frame::aggregate_mean(f, level);
}

std::vector<viz::Trace> input_traces(const VizOptions& o, const Context& ctx, frame::AggregationLevel level) {
  if (o.inputs.empty()) throw Error("bad-spec", o.kind + " plots need at least one --input");
  std::vector<viz::Trace> out;
  for (const auto& path : o.inputs) out.push_back({stem(path), load_trace(ctx, path, stem(path), level)});
  return out;
}

viz::PlotData build(const VizOptions& o, const Context& ctx) {
  if (!o.plot_json.empty()) {
    std::ifstream in(o.plot_json);
    if (!in) throw Error("io-error", "cannot read " + o.plot_json);
    nlohmann::ordered_json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error("bad-plot", o.plot_json + ": " + e.what());
    }
    return viz::plot_from_json(j);
  }
  const auto kind = viz::parse_plot_kind(o.kind);
  const auto level = frame::parse_aggregation_level(o.level);
  switch (kind) {
    case viz::PlotKind::line: {
      std::vector<viz::EventMarker> events;
      for (const auto& e : o.events) {
        const auto [date, label] = split_pair(e);
        events.push_back({frame::parse_date(date), label});
      }
      return viz::build_line(input_traces(o, ctx, level), std::move(events));
    }
    case viz::PlotKind::scatter: {
      const auto traces = input_traces(o, ctx, level);
      if (traces.size() != 2) throw Error("bad-spec", "scatter plots need exactly two --input files (x then y)");
      std::vector<double> x, y;
      for (std::size_t i = 0; i < traces[0].series.size(); ++i) {
        const auto& ts = traces[0].series.timestamps()[i];
        const auto xv = traces[0].series.values()[i];
        const auto yv = traces[1].series.at(ts);
        if (xv && yv) {
          x.push_back(*xv);
          y.push_back(*yv);
        }
      }
      auto p = viz::build_scatter(x, y, traces[1].name + " vs " + traces[0].name);
      p.x_label = traces[0].name;
      p.y_label = traces[1].name;
      return p;
    }
    case viz::PlotKind::stacked_bar: {
      if (o.categories.empty() || o.total.empty())
        throw Error("bad-spec", "stacked-bar plots need --category NAME=FILE and --total");
      std::vector<viz::Trace> cats;
      for (const auto& c : o.categories) {
        const auto [name, path] = split_pair(c);
        cats.push_back({name, load_trace(ctx, path, name, level)});
      }
      return viz::build_stacked_bar(cats, load_trace(ctx, o.total, "total", level));
    }
    case viz::PlotKind::histogram:
    case viz::PlotKind::cdf: {
      std::vector<double> sample;
      for (const auto& t : input_traces(o, ctx, level)) {
        const auto v = t.series.present_values();
        sample.insert(sample.end(), v.begin(), v.end());
      }
      return kind == viz::PlotKind::histogram ? viz::build_histogram(sample, o.bins) : viz::build_cdf(sample);
    }
    case viz::PlotKind::boxplot: {
      std::vector<viz::BoxColumn> cols;
      for (const auto& t : input_traces(o, ctx, level)) cols.push_back({t.name, t.series.present_values()});
      return viz::build_boxplot(cols);
    }
    case viz::PlotKind::heatmap:
      return viz::build_heatmap(input_traces(o, ctx, level));
  }
  throw Error("bad-spec", "unknown plot kind");
}

void run_viz(const VizOptions& o, const Context& ctx) {
  auto plot = build(o, ctx);
  if (!o.title.empty()) plot.title = o.title;
  const std::string base = o.output.empty() ? "viz_" + viz::to_string(plot.kind) : o.output;
  ensure_out_dir(ctx);
  auto j = viz::to_json(plot);
  j["meta"]["seed"] = ctx.seed;
  write_text(ctx.out_dir / (base + ".json"), j.dump(2) + "\n");
  viz::render_svg(plot, ctx.out_dir / (base + ".svg"));
  *ctx.out << "wrote " << (ctx.out_dir / (base + ".svg")).string() << "\n";
}

}  // namespace

void add_viz(CLI::App& app, Context& ctx, Action& action) {
  auto o = std::make_shared<VizOptions>();
  auto* sub = app.add_subcommand("viz", "Render plot data as JSON and SVG");
  sub->add_option("kind", o->kind, "line, scatter, stacked-bar, histogram, cdf, boxplot or heatmap");
  sub->add_option("--input", o->inputs, "Wide CSV; repeat for several traces");
  sub->add_option("--category", o->categories, "NAME=FILE category for stacked bars");
  sub->add_option("--total", o->total, "Wide CSV of bar totals");
  sub->add_option("--level", o->level, "hourly, daily or monthly");
  sub->add_option("--bins", o->bins, "Histogram bins");
  sub->add_option("--event", o->events, "DATE=LABEL marker for line plots");
  sub->add_option("--plot-json", o->plot_json, "Re-render an existing plot-data JSON file");
  sub->add_option("--title", o->title, "Plot title");
  sub->add_option("--output", o->output, "Output base name inside the output directory");
  sub->callback([o, &ctx, &action] {
    if (o->kind.empty() && o->plot_json.empty()) throw CLI::ValidationError("viz", "give a plot kind or --plot-json");
    action = [o, &ctx] { run_viz(*o, ctx); };
  });
}

}  // namespace gridtrace::cli
