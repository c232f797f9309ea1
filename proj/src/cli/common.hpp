#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridtrace/baseline/series.hpp"
#include "gridtrace/frame/csv.hpp"
#include "gridtrace/learners/model.hpp"

namespace gridtrace::cli {

struct Context {
  std::uint64_t seed = 42;
  std::filesystem::path out_dir = "out";
  std::string region = "region";
  std::string unit = "MW";
  std::vector<std::string> argv;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

frame::WideFrame load_frame(const Context& ctx, const std::string& path, const std::string& variable);
frame::Table load_table(const std::string& path);
/// "YYYY-MM-DD" (hour 0) or "YYYY-MM-DDTHH".
frame::Timestamp parse_label(const std::string& label);
frame::SeriesView table_series(const frame::Table& t, const std::string& column);

/// `name=path` pairs.
std::pair<std::string, std::string> split_pair(const std::string& text, char sep = '=');
std::string stem(const std::string& path);

void ensure_out_dir(const Context& ctx);
void write_text(const std::filesystem::path& path, const std::string& text);
/// Writes `j` with the run metadata merged into j["meta"].
void write_json(const Context& ctx, const std::filesystem::path& path, nlohmann::ordered_json j);
nlohmann::ordered_json run_meta(const Context& ctx);

/// "ridge[:lambda]" or "mlp[:H1xH2[:epochs]]"; MLP seeds derive from the run seed.
learners::LearnerSpec parse_learner(const std::string& text, std::uint64_t seed);

nlohmann::ordered_json cell_json(const frame::Cell& c);

}  // namespace gridtrace::cli
