#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cli/config.hpp"

namespace mwg::cli {

/// Everything a subcommand produces, gathered before anything touches disk.
struct CommandOutput {
  std::vector<std::pair<std::string, std::string>> files;  // file name, contents
  std::string message;                                     // for stdout
  int exit_code = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSelftest = 3;

std::string format_double(double v);

CommandOutput theory_curve_command(const RunConfig& cfg);
CommandOutput sweep_command(const RunConfig& cfg);
CommandOutput tune_command(const RunConfig& cfg);
CommandOutput mixing_command(const RunConfig& cfg);
CommandOutput selftest_command();

void write_outputs(const CommandOutput& out, const std::filesystem::path& dir);

}  // namespace mwg::cli
