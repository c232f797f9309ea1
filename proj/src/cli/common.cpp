#include "common.hpp"

#include <fstream>
#include <sstream>

#include "gridtrace/error.hpp"
#include "gridtrace/ingest/quality.hpp"

namespace gridtrace::cli {

frame::WideFrame load_frame(const Context& ctx, const std::string& path, const std::string& variable) {
  return ingest::load_csv(path, ctx.region, variable, ctx.unit);
}

frame::Table load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot open " + path);
  return frame::read_table_csv(in);
}

frame::Timestamp parse_label(const std::string& label) {
  if (label.size() == 10) return {frame::parse_date(label), 0};
  return frame::parse_timestamp(label);
}

frame::SeriesView table_series(const frame::Table& t, const std::string& column) {
  std::vector<frame::Timestamp> ts;
  for (const auto& l : t.labels) ts.push_back(parse_label(l));
  return {std::move(ts), t.column(column)};
}

std::pair<std::string, std::string> split_pair(const std::string& text, char sep) {
  const auto at = text.find(sep);
  if (at == std::string::npos || at == 0) throw Error("bad-spec", "expected NAME" + std::string(1, sep) + "VALUE, got '" + text + "'");
  return {text.substr(0, at), text.substr(at + 1)};
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

void ensure_out_dir(const Context& ctx) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  if (ec || !std::filesystem::is_directory(ctx.out_dir)) {
    throw Error("io-error", "cannot create output directory " + ctx.out_dir.string());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io-error", "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error("io-error", "failed writing " + path.string());
}

nlohmann::ordered_json run_meta(const Context& ctx) {
  nlohmann::ordered_json m;
  m["seed"] = ctx.seed;
  m["command"] = ctx.argv;
  return m;
}

void write_json(const Context& ctx, const std::filesystem::path& path, nlohmann::ordered_json j) {
  auto meta = run_meta(ctx);
  if (j.contains("meta")) {
    for (const auto& [k, v] : j["meta"].items()) meta[k] = v;
  }
  j["meta"] = std::move(meta);
  write_text(path, j.dump(2) + "\n");
}

learners::LearnerSpec parse_learner(const std::string& text, std::uint64_t seed) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty()) throw Error("bad-spec", "empty learner");
  learners::LearnerSpec spec;
  auto number = [&](const std::string& s) {
    const auto v = frame::parse_number(s);
    if (!v) throw Error("bad-spec", "bad number '" + s + "' in learner '" + text + "'");
    return *v;
  };
  if (parts[0] == "ridge" && parts.size() <= 2) {
    spec.kind = learners::RidgeSpec{parts.size() == 2 ? number(parts[1]) : 1.0};
  } else if (parts[0] == "mlp" && parts.size() <= 3) {
    learners::MlpSpec m;
    m.seed = seed;
    if (parts.size() >= 2) {
      m.hidden.clear();
      std::stringstream hs(parts[1]);
      for (std::string h; std::getline(hs, h, 'x');) m.hidden.push_back(static_cast<int>(number(h)));
    }
    if (parts.size() == 3) m.epochs = static_cast<int>(number(parts[2]));
    spec.kind = m;
  } else {
    throw Error("bad-spec", "learner must be ridge[:lambda] or mlp[:H1xH2[:epochs]], got '" + text + "'");
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json cell_json(const frame::Cell& c) { return c ? nlohmann::ordered_json(*c) : nlohmann::ordered_json(nullptr); }

}  // namespace gridtrace::cli
