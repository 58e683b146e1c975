#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace quasivar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct Invocation {
  std::string command;
  RunConfig config;
  bool quiet = false;
  /// Fixed timestamp for reproducible output in tests; empty means wall clock.
  std::string timestamp;
};

const std::vector<std::string>& command_names();

/// Runs one subcommand, writing JSON-lines to out and human notes to err.
int run_command(const Invocation& inv, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argument parsing included).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quasivar::cli
