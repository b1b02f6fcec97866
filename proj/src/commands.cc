#include "etcons/commands.h"

#include <fstream>
#include <stdexcept>

#include "etcons/report.h"

namespace etcons::cli {
namespace {

namespace fs = std::filesystem;

std::ofstream OpenOutput(const fs::path& path) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
  return out;
}

template <typename Writer>
fs::path Emit(const fs::path& path, Writer&& write) {
  std::ofstream out = OpenOutput(path);
  write(out);
  out.close();
  if (!out) throw std::runtime_error("failed while writing '" + path.string() + "'");
  return path;
}

fs::path EmitJson(const fs::path& path, const nlohmann::json& j) {
  return Emit(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

}  // namespace

CommandResult RunCommand(const RunConfig& cfg, const sim::RunOptions& options) {
  CommandResult res;
  const sim::SimTrace trace = sim::Run(cfg.scenario, options);
  const fs::path dir = cfg.output_dir;
  if (cfg.emit_trace_csv) {
    res.files.push_back(
        Emit(dir / "trace.csv", [&](std::ostream& o) { WriteTraceCsv(trace, o); }));
  }
  if (cfg.emit_events_csv) {
    res.files.push_back(
        Emit(dir / "events.csv", [&](std::ostream& o) { WriteEventsCsv(trace, o); }));
  }
  res.report = RunSummary(cfg, trace);
  if (cfg.emit_summary) res.files.push_back(EmitJson(dir / "summary.json", res.report));
  res.exit_code = trace.diverged ? kExitDiverged : kExitOk;
  return res;
}

CommandResult SpectralCommand(const RunConfig& cfg) {
  CommandResult res;
  res.report = SpectralReport(cfg);
  res.files.push_back(EmitJson(cfg.output_dir / "spectral.json", res.report));
  return res;
}

CommandResult DesignGainCommand(const RunConfig& cfg) {
  CommandResult res;
  const model::SystemModel& m = cfg.scenario.model;
  const model::GainDesign d = model::DesignGain(m.a(), m.b(), m.graph(), cfg.c_margin);
  const model::SystemModel designed = m.WithGain(d.k);
  const matlib::Mat riccati_loop = m.a() - m.b() * m.b().transpose() * d.p;
  res.report = {
      {"name", cfg.name},
      {"c_margin", cfg.c_margin},
      {"c", d.c},
      {"P", GainJson(d.p)},
      {"K", GainJson(d.k)},
      {"care_residual", d.care_residual},
      {"riccati_closed_loop_abscissa", matlib::SpectralAbscissa(riccati_loop)},
      {"consensus_condition", ConsensusConditionJson(model::CheckConsensusCondition(designed))},
      {"pi_abscissa", matlib::SpectralAbscissa(model::BuildPiW(designed).pi)},
  };
  res.files.push_back(EmitJson(cfg.output_dir / "gain.json", res.report));
  return res;
}

CommandResult CompareBaselineCommand(const RunConfig& cfg, const sim::RunOptions& options) {
  CommandResult res;
  const sim::BaselineComparison cmp = sim::CompareBaseline(cfg.scenario, sim::kConsensusThreshold, options);
  const fs::path dir = cfg.output_dir;
  res.files.push_back(
      Emit(dir / "trace.csv", [&](std::ostream& o) { WriteTraceCsv(cmp.et_trace, o); }));
  res.files.push_back(
      Emit(dir / "events.csv", [&](std::ostream& o) { WriteEventsCsv(cmp.et_trace, o); }));
  res.files.push_back(Emit(dir / "baseline_trace.csv",
                           [&](std::ostream& o) { WriteTraceCsv(cmp.cont_trace, o); }));
  int events = 0;
  for (int c : cmp.et_trace.summary.trigger_counts) events += c;
  res.report = {
      {"name", cfg.name},
      {"event_triggered", RunSummary(cfg, cmp.et_trace)},
      {"continuous_baseline", RunSummary(cfg, cmp.cont_trace)},
      {"et_final_error", cmp.et_final_error},
      {"cont_final_error", cmp.cont_final_error},
      {"threshold", sim::kConsensusThreshold},
      {"both_converged", cmp.both_converged},
      {"et_communication_instants", events},
      {"continuous_communication_instants", cmp.cont_trace.times.size()},
  };
  res.files.push_back(EmitJson(dir / "comparison.json", res.report));
  res.exit_code = (cmp.et_trace.diverged || cmp.cont_trace.diverged) ? kExitDiverged : kExitOk;
  return res;
}

}  // namespace etcons::cli
