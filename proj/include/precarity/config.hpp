#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "precarity/engine.hpp"

namespace precarity {

struct Scenario {
  std::string name;
  SimulationConfig sim;
  bool dump_policy = false;
  /// Resolved scenario settings as canonical JSON; its SHA-256 is the digest.
  std::string canonical;
  std::string digest;
};

/// Parses a JSON run configuration. Relative data paths resolve against
/// base_dir. Each entry of "scenarios" is a merge patch over the top-level
/// settings; a classifier "quantiles" list expands every scenario into one
/// run per quantile. A seed override replaces every scenario's seed.
std::vector<Scenario> parse_config(const std::string& text, const std::filesystem::path& base_dir,
                                   std::optional<std::uint64_t> seed_override = std::nullopt);

std::vector<Scenario> load_config(const std::filesystem::path& path,
                                  std::optional<std::uint64_t> seed_override = std::nullopt);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

}  // namespace precarity
