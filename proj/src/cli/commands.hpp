#pragma once

#include <functional>

#include <CLI11.hpp>

#include "common.hpp"

namespace gridtrace::cli {

using Action = std::function<void()>;

void add_ingest(CLI::App& app, Context& ctx, Action& action);
void add_baseline(CLI::App& app, Context& ctx, Action& action);
void add_regress(CLI::App& app, Context& ctx, Action& action);
void add_study(CLI::App& app, Context& ctx, Action& action);
void add_viz(CLI::App& app, Context& ctx, Action& action);

}  // namespace gridtrace::cli
