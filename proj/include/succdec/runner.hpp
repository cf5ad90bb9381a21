#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "succdec/config.hpp"

namespace succdec {

inline constexpr const char *kVersion = "0.1.0";

struct RunResult {
  std::string out_dir;
  std::vector<std::string> outputs;  // file names inside out_dir, manifest last
  double wall_seconds = 0;
};

/// Executes the configured task, writes its CSV files and manifest.json into
/// config.out_dir. Throws on invalid configs and on module failures, with the
/// task name prepended.
RunResult run(const ExperimentConfig &config, std::ostream *log = nullptr);

} // namespace succdec
