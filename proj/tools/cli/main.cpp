#include "commands.hpp"
#include "config.hpp"

#include "quenchlab/errors.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>

namespace {

int default_threads() {
  if (const char* env = std::getenv("QUENCHLAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

void report(const std::string& kind, const std::string& message, nlohmann::json extra = {}) {
  nlohmann::json body = {{"error", kind}, {"message", message}};
  if (extra.is_object()) body.update(extra);
  std::cout << body.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace quenchlab;

  CLI::App app{"quenchlab: coupled singular reaction-diffusion laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int threads = default_threads();
  std::vector<std::string> overrides;

  for (const auto& name : cli::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI experiment file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default $QUENCHLAB_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--override", overrides, "section.key=value, wins over the file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  cli::CommandContext ctx;
  try {
    ctx.config = cli::load_config(config_path, overrides);
  } catch (const cli::ConfigError& e) {
    report("config", e.what(), {{"key", e.key()}});
    return cli::kConfigError;
  }
  ctx.out = out_dir;
  ctx.threads = threads;

  try {
    return cli::run_command(command, ctx);
  } catch (const cli::ConfigError& e) {
    report("config", e.what(), {{"key", e.key()}});
    return cli::kConfigError;
  } catch (const IndefiniteOperator& e) {
    report("indefinite_operator", e.what(), {{"nu_estimate", e.nu_estimate()}});
  } catch (const std::exception& e) {
    report("runtime", e.what());
  }
  return cli::kRuntimeError;
}
