#pragma once

// CSV traces and JSON reports. Numbers are written with 17 significant
// digits so that re-reading a file reproduces every double exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "etcons/config.h"
#include "etcons/model.h"
#include "etcons/sim.h"
#include "json.hpp"

namespace etcons::cli {

std::string FormatDouble(double v);

// time, x{i}_{d} per agent and component, e{i} per agent, threshold.
void WriteTraceCsv(const sim::SimTrace& trace, std::ostream& out);
// time, agent (1-based).
void WriteEventsCsv(const sim::SimTrace& trace, std::ostream& out);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable ReadCsv(std::istream& in);

nlohmann::json GainJson(const matlib::Mat& k);
nlohmann::json ConsensusConditionJson(const model::ConsensusConditionReport& report);

// Hurwitz-condition verdict, spectra of Pi and every Omega_i, alpha admissibility.
nlohmann::json SpectralReport(const RunConfig& cfg);

// Trigger counts, consensus error, Zeno gaps, spectral verdict, and gain.
nlohmann::json RunSummary(const RunConfig& cfg, const sim::SimTrace& trace);

}  // namespace etcons::cli
