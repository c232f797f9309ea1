#include "gridtrace/cli/app.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "commands.hpp"
#include "gridtrace/error.hpp"

namespace gridtrace::cli {

namespace {

/// JSON config: top-level keys are root flags, nested objects are keyed by subcommand.
/// The "seed" key is held back so the environment can take precedence over it.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::optional<std::uint64_t>* seed) : seed_(seed) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

  void collect(const nlohmann::json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) const {
    for (const auto& [key, value] : j.items()) {
      if (parents.empty() && key == "seed") {
        if (!value.is_number_unsigned()) throw CLI::ConversionError("config seed must be a non-negative integer");
        *seed_ = value.get<std::uint64_t>();
        continue;
      }
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        collect(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  std::optional<std::uint64_t>* seed_;
};

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv("GRIDTRACE_SEED");
  if (!text || !*text) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (*end != '\0' || text[0] == '-') throw Error("bad-spec", std::string("GRIDTRACE_SEED is not an integer: ") + text);
  return v;
}

}  // namespace

int exit_code_for(const std::string& code) {
  static const std::set<std::string> io{"io-error"};
  static const std::set<std::string> numerical{
      "collinear", "no-converge", "unstable", "singular", "diverged", "zero-variance", "bad-covariance",
      "short-series", "zero-baseline", "zero-total", "zero-actual", "share-overflow", "no-overlap"};
  if (io.contains(code)) return kExitIo;
  if (numerical.contains(code)) return kExitNumerical;
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  ctx.argv = args;
  std::optional<std::uint64_t> config_seed, flag_seed;
  std::string out_dir = "out";

  CLI::App app{"Counterfactual baselines, regression diagnostics and studies for hourly grid data", "gridtrace"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>(&config_seed));
  app.set_config("--config", "", "JSON file with flag values (nested objects per command)");
  app.add_option("--seed", flag_seed, "Root random seed (default 42; GRIDTRACE_SEED overrides the config file)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--region", ctx.region, "Region label for loaded frames");
  app.add_option("--unit", ctx.unit, "Unit label for loaded frames");

  Action action;
  add_ingest(app, ctx, action);
  add_baseline(app, ctx, action);
  add_regress(app, ctx, action);
  add_study(app, ctx, action);
  add_viz(app, ctx, action);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    out << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }

  try {
    const auto from_env = env_seed();
    ctx.seed = flag_seed ? *flag_seed : from_env ? *from_env : config_seed ? *config_seed : kDefaultSeed;
    ctx.out_dir = out_dir;
    if (action) action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace gridtrace::cli
