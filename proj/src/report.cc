#include "etcons/report.h"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "etcons/errors.h"

namespace etcons::cli {

using nlohmann::json;

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void WriteTraceCsv(const sim::SimTrace& trace, std::ostream& out) {
  out << "time";
  for (int i = 1; i <= trace.n_agents; ++i) {
    for (int d = 1; d <= trace.n; ++d) out << ",x" << i << '_' << d;
  }
  for (int i = 1; i <= trace.n_agents; ++i) out << ",e" << i;
  out << ",threshold\n";
  for (std::size_t s = 0; s < trace.times.size(); ++s) {
    out << FormatDouble(trace.times[s]);
    const auto& x = trace.states[s];
    for (Eigen::Index c = 0; c < x.size(); ++c) out << ',' << FormatDouble(x(c));
    for (double e : trace.error_norms[s]) out << ',' << FormatDouble(e);
    out << ',' << FormatDouble(trace.thresholds[s]) << '\n';
  }
}

void WriteEventsCsv(const sim::SimTrace& trace, std::ostream& out) {
  out << "time,agent\n";
  for (const sim::Event& e : trace.events) {
    out << FormatDouble(e.time) << ',' << (e.agent + 1) << '\n';
  }
}

CsvTable ReadCsv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    table.rows.push_back(std::move(row));
  }
  return table;
}

json GainJson(const matlib::Mat& k) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < k.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < k.cols(); ++c) row.push_back(k(r, c));
    rows.push_back(row);
  }
  return rows;
}

namespace {

json ComplexJson(matlib::Complex z) { return json::array({z.real(), z.imag()}); }

json SpectrumJson(const matlib::Spectrum& s) {
  json out = json::array();
  for (const auto& z : s) out.push_back(ComplexJson(z));
  return out;
}

}  // namespace

json ConsensusConditionJson(const model::ConsensusConditionReport& report) {
  json per = json::array();
  for (const auto& c : report.per_eigenvalue) {
    per.push_back({{"lambda", ComplexJson(c.lambda)},
                   {"max_real_part", c.max_real_part},
                   {"hurwitz", c.hurwitz},
                   {"marginal", c.marginal}});
  }
  return {{"holds", report.holds},
          {"laplacian_spectrum", SpectrumJson(report.laplacian_spectrum)},
          {"per_eigenvalue", per}};
}

json SpectralReport(const RunConfig& cfg) {
  const model::SystemModel& m = cfg.scenario.model;
  const model::ConsensusConditionReport t1 = model::CheckConsensusCondition(m);
  const model::ClosedLoopMatrices clm = model::BuildPiW(m);
  const model::AbscissaReport mu = model::SpectralAbscissaReport(clm);

  json omega = json::array();
  for (std::size_t i = 0; i < clm.omega.size(); ++i) {
    omega.push_back({{"agent", i + 1},
                     {"spectrum", SpectrumJson(matlib::Eigenvalues(clm.omega[i]))},
                     {"spectral_abscissa", mu.mu_omega[i]}});
  }
  json out = {{"name", cfg.name},
              {"gain", GainJson(m.k())},
              {"consensus_condition", ConsensusConditionJson(t1)},
              {"pi", {{"spectrum", SpectrumJson(matlib::Eigenvalues(clm.pi))},
                      {"spectral_abscissa", mu.mu_pi},
                      {"hurwitz", model::IsHurwitz(clm.pi)}}},
              {"omega", omega}};
  if (cfg.scenario.alpha > 0.0) {
    json a = {{"alpha", cfg.scenario.alpha}, {"upper_bound", -mu.mu_pi}};
    if (model::IsHurwitz(clm.pi)) {
      a["admissible"] = model::ValidateAlpha(cfg.scenario.alpha, clm.pi);
    } else {
      a["admissible"] = false;
      a["note"] = "Pi is not Hurwitz; no admissible alpha exists";
    }
    out["alpha"] = a;
  }
  return out;
}

json RunSummary(const RunConfig& cfg, const sim::SimTrace& trace) {
  const sim::ZenoReport zeno = sim::ZenoDiagnostics(trace);
  int total = 0;
  for (int c : trace.summary.trigger_counts) total += c;
  json out = {
      {"name", cfg.name},
      {"mode", trace.mode == sim::Mode::kEventTriggered ? "event_triggered"
                                                       : "continuous_baseline"},
      {"horizon", trace.horizon},
      {"step", trace.step},
      {"samples", trace.times.size()},
      {"c1", trace.c1},
      {"alpha", trace.alpha},
      {"gain", GainJson(cfg.scenario.model.k())},
      {"gain_mode", cfg.gain_mode == GainMode::kAuto ? "auto" : "explicit"},
      {"theta_init", cfg.scenario.theta_init == protocol::ThetaInit::kGlobal ? "global"
                                                                             : "in_neighbors"},
      {"trigger_counts", trace.summary.trigger_counts},
      {"total_events", total},
      {"final_consensus_error", trace.summary.final_consensus_error},
      {"min_inter_event_interval", trace.summary.min_inter_event_interval},
      {"per_agent_min_gap", zeno.per_agent_min_gap},
      {"diverged", trace.diverged},
      {"consensus_condition", ConsensusConditionJson(model::CheckConsensusCondition(cfg.scenario.model))},
  };
  out["diverged_at"] = trace.diverged ? json(trace.diverged_at) : json(nullptr);
  if (cfg.design) {
    out["design"] = {{"c", cfg.design->c},
                     {"P", GainJson(cfg.design->p)},
                     {"care_residual", cfg.design->care_residual}};
  }
  return out;
}

}  // namespace etcons::cli
