#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gridtrace/error.hpp"
#include "gridtrace/viz/plot.hpp"

namespace gridtrace::viz {

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void widen() {
    if (hi <= lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

class Canvas {
 public:
  Canvas(const PlotData& p, Range x, Range y) : plot_(p), x_(x), y_(y) {}

  double px(double v) const { return area_.left + (v - x_.lo) / (x_.hi - x_.lo) * area_.width; }
  double py(double v) const { return area_.top + area_.height - (v - y_.lo) / (y_.hi - y_.lo) * area_.height; }
  const PlotArea& area() const { return area_; }
  std::ostringstream& out() { return out_; }

  void axes(bool numeric_x) {
    const double bottom = area_.top + area_.height;
    out_ << "<g class=\"axes\" stroke=\"#000\" stroke-width=\"1\">\n";
    out_ << "<line x1=\"" << num(area_.left) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(area_.left + area_.width)
         << "\" y2=\"" << num(bottom) << "\"/>\n";
    out_ << "<line x1=\"" << num(area_.left) << "\" y1=\"" << num(area_.top) << "\" x2=\"" << num(area_.left) << "\" y2=\""
         << num(bottom) << "\"/>\n</g>\n";
    out_ << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 4; ++i) {
      const double v = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      out_ << "<text x=\"" << num(area_.left - 6) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">" << tick(v)
           << "</text>\n";
    }
    if (numeric_x) {
      for (int i = 0; i <= 4; ++i) {
        const double v = x_.lo + (x_.hi - x_.lo) * i / 4.0;
        std::string label = tick(v);
        if (!plot_.x_labels.empty()) {
          const auto it = std::lower_bound(plot_.x.begin(), plot_.x.end(), v);
          if (it != plot_.x.end()) label = plot_.x_labels[static_cast<std::size_t>(it - plot_.x.begin())];
        }
        out_ << "<text x=\"" << num(px(v)) << "\" y=\"" << num(bottom + 18) << "\" text-anchor=\"middle\">"
             << escape(label) << "</text>\n";
      }
    }
    out_ << "</g>\n";
  }

 private:
  const PlotData& plot_;
  Range x_;
  Range y_;
  PlotArea area_;
  std::ostringstream out_;
};

Range value_range(const PlotData& p) {
  Range r{INFINITY, -INFINITY};
  for (const auto& s : p.series) {
    for (const auto& v : s.y) {
      if (!v) continue;
      r.lo = std::min(r.lo, *v);
      r.hi = std::max(r.hi, *v);
    }
  }
  if (r.lo > r.hi) r = {0.0, 1.0};
  r.widen();
  return r;
}

Range x_range(const PlotData& p) {
  if (p.x.empty()) return {0.0, 1.0};
  Range r{*std::min_element(p.x.begin(), p.x.end()), *std::max_element(p.x.begin(), p.x.end())};
  r.widen();
  return r;
}

void slot_labels(Canvas& c, const std::vector<std::string>& labels, double slot) {
  const double bottom = c.area().top + c.area().height;
  const std::size_t stride = std::max<std::size_t>(1, labels.size() / 12 + (labels.size() % 12 ? 1 : 0));
  c.out() << "<g class=\"slots\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < labels.size(); i += stride) {
    c.out() << "<text x=\"" << num(c.area().left + (static_cast<double>(i) + 0.5) * slot) << "\" y=\"" << num(bottom + 18)
            << "\" text-anchor=\"middle\">" << escape(labels[i]) << "</text>\n";
  }
  c.out() << "</g>\n";
}

void draw_lines(Canvas& c, const PlotData& p) {
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    c.out() << "<g class=\"series\" data-series=\"" << escape(s.name) << "\" fill=\"none\" stroke=\""
            << kPalette[k % kPalette.size()] << "\" stroke-width=\"1.5\">\n";
    std::string points;
    auto flush = [&] {
      if (!points.empty()) c.out() << "<polyline points=\"" << points << "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      if (!s.y[i]) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += num(c.px(p.x[i])) + "," + num(c.py(*s.y[i]));
    }
    flush();
    c.out() << "</g>\n";
  }
}

void draw_scatter(Canvas& c, const PlotData& p) {
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    c.out() << "<g class=\"series\" fill=\"" << kPalette[k % kPalette.size()] << "\">\n";
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      if (p.series[k].y[i]) {
        c.out() << "<circle cx=\"" << num(c.px(p.x[i])) << "\" cy=\"" << num(c.py(*p.series[k].y[i])) << "\" r=\"2\"/>\n";
      }
    }
    c.out() << "</g>\n";
  }
}

void draw_cdf(Canvas& c, const PlotData& p) {
  if (p.series.empty() || p.x.empty()) return;
  const auto& y = p.series[0].y;
  std::string d = "M" + num(c.area().left) + "," + num(c.py(0.0));
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    d += " H" + num(c.px(p.x[i])) + " V" + num(c.py(y[i].value_or(0.0)));
  }
  d += " H" + num(c.area().left + c.area().width);
  c.out() << "<path class=\"cdf\" d=\"" << d << "\" fill=\"none\" stroke=\"" << kPalette[0] << "\" stroke-width=\"1.5\"/>\n";
}

void draw_stacked(Canvas& c, const PlotData& p) {
  const double slot = c.area().width / static_cast<double>(std::max<std::size_t>(1, p.x.size()));
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    double base = 0.0;
    for (std::size_t k = 0; k < p.series.size(); ++k) {
      const double share = p.series[k].y[i].value_or(0.0);
      const double top = c.py(base + share);
      const double height = c.py(base) - top;
      c.out() << "<rect class=\"bar\" data-bar=\"" << i << "\" data-series=\"" << k << "\" x=\""
              << num(c.area().left + (static_cast<double>(i) + 0.1) * slot) << "\" y=\"" << num(top) << "\" width=\""
              << num(0.8 * slot) << "\" height=\"" << num(height) << "\" fill=\"" << kPalette[k % kPalette.size()]
              << "\"/>\n";
      base += share;
    }
  }
  slot_labels(c, p.x_labels, slot);
}

void draw_histogram(Canvas& c, const PlotData& p) {
  if (p.series.empty()) return;
  const auto edges = p.meta.contains("edges") ? p.meta["edges"].get<std::vector<double>>() : std::vector<double>{};
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    const double half = edges.size() == p.x.size() + 1 ? 0.5 * (edges[i + 1] - edges[i]) : 0.5;
    const double top = c.py(p.series[0].y[i].value_or(0.0));
    c.out() << "<rect class=\"bin\" x=\"" << num(c.px(p.x[i] - half)) << "\" y=\"" << num(top) << "\" width=\""
            << num(c.px(p.x[i] + half) - c.px(p.x[i] - half)) << "\" height=\"" << num(c.py(0.0) - top) << "\" fill=\""
            << kPalette[0] << "\" stroke=\"#fff\"/>\n";
  }
}

void draw_boxplot(Canvas& c, const PlotData& p) {
  const double slot = c.area().width / static_cast<double>(std::max<std::size_t>(1, p.series.size()));
  std::vector<std::string> names;
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& q = p.series[k].y;
    names.push_back(p.series[k].name);
    if (q.size() != 5) continue;
    const double mid = c.area().left + (static_cast<double>(k) + 0.5) * slot;
    const double half = 0.3 * slot;
    c.out() << "<g class=\"box\" stroke=\"#000\" fill=\"" << kPalette[k % kPalette.size()] << "\">\n";
    c.out() << "<line x1=\"" << num(mid) << "\" y1=\"" << num(c.py(*q[0])) << "\" x2=\"" << num(mid) << "\" y2=\""
            << num(c.py(*q[4])) << "\"/>\n";
    c.out() << "<rect x=\"" << num(mid - half) << "\" y=\"" << num(c.py(*q[3])) << "\" width=\"" << num(2 * half)
            << "\" height=\"" << num(c.py(*q[1]) - c.py(*q[3])) << "\"/>\n";
    for (std::size_t level : {0u, 2u, 4u}) {
      c.out() << "<line x1=\"" << num(mid - half) << "\" y1=\"" << num(c.py(*q[level])) << "\" x2=\"" << num(mid + half)
              << "\" y2=\"" << num(c.py(*q[level])) << "\"/>\n";
    }
    c.out() << "</g>\n";
  }
  slot_labels(c, names, slot);
}

std::string heat_colour(double r) {
  const double t = std::clamp(r, -1.0, 1.0);
  const auto ch = [](double v) { return static_cast<int>(std::lround(255.0 * v)); };
  char buf[8];
  if (t >= 0) std::snprintf(buf, sizeof buf, "#%02x%02x%02x", 255, ch(1 - t), ch(1 - t));
  else std::snprintf(buf, sizeof buf, "#%02x%02x%02x", ch(1 + t), ch(1 + t), 255);
  return buf;
}

void draw_heatmap(Canvas& c, const PlotData& p) {
  const std::size_t n = p.series.size();
  if (n == 0) return;
  const double w = c.area().width / static_cast<double>(n);
  const double h = c.area().height / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p.series[i].y.size(); ++j) {
      const double r = p.series[i].y[j].value_or(0.0);
      c.out() << "<rect class=\"cell\" x=\"" << num(c.area().left + static_cast<double>(j) * w) << "\" y=\""
              << num(c.area().top + static_cast<double>(i) * h) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
              << "\" fill=\"" << heat_colour(r) << "\"/>\n";
      c.out() << "<text x=\"" << num(c.area().left + (static_cast<double>(j) + 0.5) * w) << "\" y=\""
              << num(c.area().top + (static_cast<double>(i) + 0.5) * h + 4)
              << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(r) << "</text>\n";
    }
  }
  slot_labels(c, p.x_labels, w);
}

void draw_events(Canvas& c, const PlotData& p) {
  if (p.events.empty() || !p.meta.contains("x_origin")) return;
  const long origin = frame::to_hours(frame::parse_timestamp(p.meta["x_origin"].get<std::string>()));
  c.out() << "<g class=\"events\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const auto& e : p.events) {
    const double x = c.px(static_cast<double>(frame::to_hours({e.date, 0}) - origin));
    c.out() << "<line class=\"event\" x1=\"" << num(x) << "\" y1=\"" << num(c.area().top) << "\" x2=\"" << num(x)
            << "\" y2=\"" << num(c.area().top + c.area().height) << "\" stroke=\"#555\" stroke-dasharray=\"4 3\"/>\n";
    c.out() << "<text x=\"" << num(x + 3) << "\" y=\"" << num(c.area().top + 12) << "\">" << escape(e.label) << "</text>\n";
  }
  c.out() << "</g>\n";
}

}  // namespace

std::string render_svg(const PlotData& plot) {
  plot.validate();
  Range x = x_range(plot), y = value_range(plot);
  bool numeric_x = true;
  switch (plot.kind) {
    case PlotKind::stacked_bar: y = {0.0, 100.0}; numeric_x = false; break;
    case PlotKind::histogram:
      y.lo = 0.0;
      if (plot.meta.contains("edges")) {
        const auto edges = plot.meta["edges"].get<std::vector<double>>();
        if (!edges.empty()) x = {edges.front(), edges.back()};
      }
      break;
    case PlotKind::cdf: y = {0.0, 1.0}; break;
    case PlotKind::heatmap: y = {-1.0, 1.0}; numeric_x = false; break;
    case PlotKind::boxplot: numeric_x = false; break;
    default: break;
  }
  Canvas c(plot, x, y);
  c.axes(numeric_x && plot.kind != PlotKind::heatmap);
  switch (plot.kind) {
    case PlotKind::line: draw_lines(c, plot); break;
    case PlotKind::scatter: draw_scatter(c, plot); break;
    case PlotKind::stacked_bar: draw_stacked(c, plot); break;
    case PlotKind::histogram: draw_histogram(c, plot); break;
    case PlotKind::cdf: draw_cdf(c, plot); break;
    case PlotKind::boxplot: draw_boxplot(c, plot); break;
    case PlotKind::heatmap: draw_heatmap(c, plot); break;
  }
  draw_events(c, plot);

  std::ostringstream doc;
  doc << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kCanvasWidth << "\" height=\""
      << kCanvasHeight << "\" viewBox=\"0 0 " << kCanvasWidth << ' ' << kCanvasHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  if (!plot.title.empty()) {
    doc << "<text x=\"480\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
        << escape(plot.title) << "</text>\n";
  }
  if (!plot.x_label.empty()) {
    doc << "<text x=\"505\" y=\"520\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape(plot.x_label) << "</text>\n";
  }
  if (!plot.y_label.empty()) {
    doc << "<text x=\"18\" y=\"260\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 18 260)\">"
        << escape(plot.y_label) << "</text>\n";
  }
  doc << c.out().str();
  if (plot.series.size() > 1 && plot.kind != PlotKind::heatmap) {
    doc << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
      const double yy = 58.0 + 14.0 * static_cast<double>(k);
      doc << "<rect x=\"840\" y=\"" << num(yy - 9) << "\" width=\"10\" height=\"10\" fill=\"" << kPalette[k % kPalette.size()]
          << "\"/>\n<text x=\"855\" y=\"" << num(yy) << "\">" << escape(plot.series[k].name) << "</text>\n";
    }
    doc << "</g>\n";
  }
  doc << "</svg>\n";
  return doc.str();
}

void render_svg(const PlotData& plot, const std::filesystem::path& path) {
  const std::string text = render_svg(plot);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io-error", "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error("io-error", "failed writing " + path.string());
}

}  // namespace gridtrace::viz
