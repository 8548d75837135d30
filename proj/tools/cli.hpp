#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace swflood::cli {

struct BuildDsm {
  std::string dtm;
  std::string features;
  std::string classes;
  double close_tolerance = 0.1;
  std::string out;
};

struct Run {
  std::string config;
  std::optional<int> blocks;  ///< unset: SWFLOOD_BLOCKS, then the config file, then 1
};

struct Validate {
  std::string case_name;
  int n = 400;
  std::string report;  ///< CSV path, empty for none
};

using Command = std::variant<BuildDsm, Run, Validate>;

/// Thrown by parse_args for --help (exit_code 0) and for bad usage (nonzero).
class UsageExit : public std::runtime_error {
 public:
  UsageExit(std::string text, int exit_code) : std::runtime_error(std::move(text)), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// args excludes the program name.
Command parse_args(const std::vector<std::string>& args);

/// Executes a command; returns 0 on success, 1 on configuration or input errors, 2 on a
/// numerical abort.
int execute(const Command& command);

/// Number of blocks for a run: CLI flag, then the environment variable, then the config.
int resolve_blocks(const std::optional<int>& cli, const char* env, int config);

}  // namespace swflood::cli
