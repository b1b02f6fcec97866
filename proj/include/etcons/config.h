#pragma once

// Scenario configuration files.
//
// The format is INI-like: `[section]` headers and `key = value` lines, where
// every value is a JSON literal (number, string, bool, or nested array). A
// value whose brackets are unbalanced continues on the following lines.
// `#` starts a comment outside of strings. Agent and component indices in
// edge lists are 1-based.
//
//   [system]   n, m (optional cross-checks), A, B
//   [gain]     K = [[...]]  or  mode = "auto" with optional c_margin
//   [graph]    agents (optional), weights = N x N  or  edges = [[i, j, w?], ...]
//   [trigger]  c1, alpha
//   [sim]      horizon, step, mode, initial_states, divergence_experiment,
//              theta_init = "in_neighbors" | "global"
//   [output]   dir, emit = ["trace_csv", "events_csv", "summary"]

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "etcons/model.h"
#include "etcons/sim.h"

namespace etcons::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class GainMode { kExplicit, kAuto };

// What the configuration will be used for. Analysis configs may omit the
// [trigger] and [sim] sections and are not required to satisfy the Hurwitz
// condition (reporting on it is their purpose).
enum class Purpose { kSimulation, kAnalysis };

struct RunConfig {
  std::string name;
  sim::Scenario scenario;
  GainMode gain_mode = GainMode::kExplicit;
  double c_margin = model::kDefaultCMargin;
  std::optional<model::GainDesign> design;  // set when gain_mode is kAuto
  bool has_simulation_fields = false;

  std::filesystem::path output_dir = "out";
  bool emit_trace_csv = true;
  bool emit_events_csv = true;
  bool emit_summary = true;
};

RunConfig ParseConfig(std::string_view text, Purpose purpose = Purpose::kSimulation,
                      std::string name = "config");

RunConfig LoadConfigFile(const std::filesystem::path& path,
                         Purpose purpose = Purpose::kSimulation);

// Built-in scenarios: "paper-sec5", "paper-sec5-auto", "divergence".
std::vector<std::string> PresetNames();
std::string PresetText(std::string_view name);
RunConfig LoadPreset(std::string_view name, Purpose purpose = Purpose::kSimulation);

}  // namespace etcons::cli
