#pragma once

#include "config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace quenchlab::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kConfigError = 2, kInapplicable = 2, kRuntimeError = 3 };

struct CommandContext {
  RunConfig config;
  std::filesystem::path out;
  int threads = 1;
};

const std::vector<std::string>& command_names();

// Writes the command's files into ctx.out and returns its exit code. Module
// errors propagate as exceptions.
int run_command(const std::string& name, const CommandContext& ctx);

}  // namespace quenchlab::cli
