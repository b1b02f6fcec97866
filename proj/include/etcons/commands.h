#pragma once

// Command implementations behind the `etcons` executable. Each writes its
// outputs under cfg.output_dir and returns the process exit status.

#include <filesystem>
#include <vector>

#include "etcons/config.h"
#include "etcons/sim.h"
#include "json.hpp"

namespace etcons::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitAssumption = 3,
  kExitDiverged = 4,
};

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
  std::vector<std::filesystem::path> files;
};

// Simulates and writes trace.csv, events.csv, summary.json as requested.
CommandResult RunCommand(const RunConfig& cfg, const sim::RunOptions& options = {});

// Writes spectral.json.
CommandResult SpectralCommand(const RunConfig& cfg);

// Synthesizes K from the config's system and graph; writes gain.json.
CommandResult DesignGainCommand(const RunConfig& cfg);

// Runs both protocols on the same data; writes trace.csv, events.csv,
// baseline_trace.csv and comparison.json.
CommandResult CompareBaselineCommand(const RunConfig& cfg,
                                     const sim::RunOptions& options = {});

}  // namespace etcons::cli
