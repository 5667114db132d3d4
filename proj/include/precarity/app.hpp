#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace precarity::app {

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;
  bool parallel_scenarios = false;
};

/// Runs every scenario of the config and writes, per scenario, <name>.csv and
/// <name>.meta.json, plus comparison.csv (each scenario against the first).
/// Returns the process exit status; errors are reported on `err`.
int run(const RunOptions& opts, std::ostream& err);

/// Prints the comparison of two report files to `out`.
int compare(const std::filesystem::path& a, const std::filesystem::path& b, std::ostream& out,
            std::ostream& err);

/// Sets the log level from PRECARITY_VERBOSITY (trace, debug, info, warn,
/// error, off); default warn.
void configure_logging();

}  // namespace precarity::app
