#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deun/engine.hpp"

namespace deun {

inline const std::vector<std::string> kCommands = {"validate", "decompose", "jtree", "expand",
                                                   "evaluate", "rank",      "oracle"};

struct RunConfig {
  std::string command;
  std::filesystem::path model_path;
  std::optional<std::string> decision;
  std::optional<Method> method;  // default_method() when unset
  std::optional<std::uint64_t> mc_samples;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> output_path;
  bool structured = false;  // JSON instead of text tables
  bool clamp = false;       // oracle: clamp samples into the domains
};

/// Runs one command. The report goes to out (or output_path); diagnostics to
/// err. Returns the exit status: 0 success, 1 validation, 2 computation, 3 I/O.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace deun
