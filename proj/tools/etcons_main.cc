// Command-line front end: etcons <run|spectral|design-gain|compare-baseline>
//   (--config PATH | --preset NAME) [--out DIR] [--parallel] [--seed N]

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "etcons/commands.h"
#include "etcons/config.h"
#include "etcons/errors.h"

namespace {

using etcons::cli::Purpose;

struct GlobalFlags {
  std::string config;
  std::string preset;
  std::string out;
  bool parallel = false;
  std::optional<long> seed;  // reserved; runs are deterministic
};

etcons::cli::RunConfig Load(const GlobalFlags& flags, Purpose purpose) {
  if (flags.config.empty() == flags.preset.empty()) {
    throw etcons::cli::ConfigError("give exactly one of --config PATH or --preset NAME");
  }
  etcons::cli::RunConfig cfg = flags.config.empty()
                                   ? etcons::cli::LoadPreset(flags.preset, purpose)
                                   : etcons::cli::LoadConfigFile(flags.config, purpose);
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictor-based event-triggered consensus simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--config", flags.config, "Scenario configuration file");
  std::string preset_help = "Built-in scenario:";
  for (const auto& p : etcons::cli::PresetNames()) preset_help += " " + p;
  app.add_option("--preset", flags.preset, preset_help);
  app.add_option("--out", flags.out, "Output directory (overrides [output] dir)");
  app.add_flag("--parallel", flags.parallel, "Run per-agent kernels under OpenMP");
  app.add_option("--seed", flags.seed, "Reserved; simulations are deterministic");

  auto* run = app.add_subcommand("run", "Simulate and write trace/events/summary");
  auto* spectral = app.add_subcommand("spectral", "Check the Hurwitz condition and spectra");
  auto* design = app.add_subcommand("design-gain", "Synthesize K from the Riccati recipe");
  auto* compare =
      app.add_subcommand("compare-baseline", "Event-triggered vs continuous protocol");

  CLI11_PARSE(app, argc, argv);

  etcons::sim::RunOptions options;
  options.execution =
      flags.parallel ? etcons::sim::Execution::kParallel : etcons::sim::Execution::kSerial;

  try {
    etcons::cli::CommandResult res;
    if (run->parsed()) {
      res = etcons::cli::RunCommand(Load(flags, Purpose::kSimulation), options);
    } else if (spectral->parsed()) {
      res = etcons::cli::SpectralCommand(Load(flags, Purpose::kAnalysis));
    } else if (design->parsed()) {
      res = etcons::cli::DesignGainCommand(Load(flags, Purpose::kAnalysis));
    } else if (compare->parsed()) {
      res = etcons::cli::CompareBaselineCommand(Load(flags, Purpose::kSimulation), options);
    }
    std::cout << res.report.dump(2) << '\n';
    for (const auto& f : res.files) std::cerr << "wrote " << f.string() << '\n';
    return res.exit_code;
  } catch (const etcons::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return etcons::cli::kExitConfig;
  } catch (const etcons::AssumptionError& e) {
    std::cerr << "assumption violated: " << e.what() << '\n';
    return etcons::cli::kExitAssumption;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return etcons::cli::kExitFailure;
  }
}
