#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "etcons/commands.h"
#include "etcons/config.h"
#include "etcons/errors.h"
#include "etcons/report.h"
#include "oracles.h"

using namespace etcons;
namespace fs = std::filesystem;

namespace {

constexpr const char* kMinimal = R"([system]
A = [[0, 1], [-1, 0]]
B = [[1], [1]]

[gain]
K = [[-2.2, -1.1]]

[graph]
agents = 2
edges = [[2, 1], [1, 2]]

[trigger]
c1 = 0.6
alpha = 0.4

[sim]
horizon = 1.0
initial_states = [[1, 0], [0, 1]]
)";

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("etcons_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(ETCONS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string ReplaceOnce(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("example preset parses into the published scenario") {
  const auto cfg = cli::LoadPreset("paper-sec5");
  const auto& m = cfg.scenario.model;
  CHECK(m.a() == oracle::ExampleA());
  CHECK(m.b() == oracle::ExampleB());
  CHECK(m.k() == oracle::ExampleK());
  CHECK(m.graph().weights() == oracle::ExampleWeights());
  CHECK(cfg.scenario.c1 == 0.6);
  CHECK(cfg.scenario.alpha == 0.4);
  CHECK(cfg.scenario.step == 1e-3);
  CHECK(cfg.scenario.horizon == 20.0);
  CHECK(cfg.scenario.initial_states[4](1) == -0.1);
  CHECK(cfg.scenario.theta_init == protocol::ThetaInit::kGlobal);
}

TEST_CASE("every preset loads") {
  for (const auto& name : cli::PresetNames()) CHECK_NOTHROW(cli::LoadPreset(name));
  CHECK_THROWS_AS(cli::LoadPreset("nope"), cli::ConfigError);
}

TEST_CASE("shipped configuration files load") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(ETCONS_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(cli::LoadConfigFile(entry.path()));
    ++seen;
  }
  CHECK(seen >= 3);
}

TEST_CASE("auto gain mode designs K") {
  const auto cfg = cli::LoadPreset("paper-sec5-auto");
  REQUIRE(cfg.design.has_value());
  CHECK(cfg.scenario.model.k() == cfg.design->k);
  CHECK(model::CheckConsensusCondition(cfg.scenario.model).holds);
}

TEST_CASE("edge lists are 1-based and multi-line values continue") {
  const auto cfg = cli::ParseConfig(kMinimal);
  CHECK(cfg.scenario.model.graph().weight(1, 0) == 1.0);
  CHECK(cfg.scenario.model.graph().weight(0, 1) == 1.0);
  CHECK(cfg.scenario.horizon == 1.0);
  CHECK(cfg.scenario.step == 1e-3);
}

TEST_CASE("predictor initialization is selectable") {
  const auto cfg = cli::ParseConfig(std::string(kMinimal) + "theta_init = \"in_neighbors\"\n");
  CHECK(cfg.scenario.theta_init == protocol::ThetaInit::kInNeighbors);
  CHECK_THROWS_AS(cli::ParseConfig(std::string(kMinimal) + "theta_init = \"psychic\"\n"),
                  cli::ConfigError);
}

TEST_CASE("configuration errors carry a location") {
  SUBCASE("self loop") {
    const std::string text = ReplaceOnce(kMinimal, "[[2, 1], [1, 2]]", "[[2, 2], [1, 2]]");
    try {
      cli::ParseConfig(text);
      FAIL("expected a config error");
    } catch (const cli::ConfigError& e) {
      CHECK(e.line() == 10);
    }
  }
  SUBCASE("syntax error") {
    const std::string text = ReplaceOnce(kMinimal, "c1 = 0.6", "c1 = 0.6.1");
    try {
      cli::ParseConfig(text);
      FAIL("expected a config error");
    } catch (const cli::ConfigError& e) {
      CHECK(e.line() == 13);
      CHECK(e.column() > 0);
    }
  }
  SUBCASE("unknown key") {
    CHECK_THROWS_AS(cli::ParseConfig(std::string(kMinimal) + "bogus = 1\n"), cli::ConfigError);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(cli::ParseConfig(ReplaceOnce(kMinimal, "[[-2.2, -1.1]]", "[[-2.2]]")),
                    cli::ConfigError);
  }
  SUBCASE("missing spanning tree is an assumption failure") {
    CHECK_THROWS_AS(cli::ParseConfig(ReplaceOnce(kMinimal, "[[2, 1], [1, 2]]", "[]")),
                    AssumptionError);
  }
}

TEST_CASE("trace CSV round trip") {
  auto cfg = cli::ParseConfig(kMinimal);
  const auto trace = sim::Run(cfg.scenario);
  std::stringstream ss;
  cli::WriteTraceCsv(trace, ss);
  const auto table = cli::ReadCsv(ss);
  CHECK(table.header == std::vector<std::string>{"time", "x1_1", "x1_2", "x2_1", "x2_2", "e1",
                                                 "e2", "threshold"});
  REQUIRE(table.rows.size() == trace.times.size());
  for (std::size_t k = 0; k < table.rows.size(); k += 97) {
    CHECK(table.rows[k][0] == trace.times[k]);
    CHECK(table.rows[k][3] == trace.states[k](2));
    CHECK(table.rows[k][6] == trace.error_norms[k][1]);
    CHECK(table.rows[k][7] == trace.thresholds[k]);
  }
  std::stringstream ev;
  cli::WriteEventsCsv(trace, ev);
  const auto events = cli::ReadCsv(ev);
  CHECK(events.header == std::vector<std::string>{"time", "agent"});
  CHECK(events.rows.size() == trace.events.size());
  CHECK(events.rows[0][1] == 1.0);
}

TEST_CASE("run command writes its files") {
  auto cfg = cli::ParseConfig(kMinimal);
  cfg.output_dir = TempDir("run");
  const auto res = cli::RunCommand(cfg);
  CHECK(res.exit_code == cli::kExitOk);
  CHECK(fs::exists(cfg.output_dir / "trace.csv"));
  CHECK(fs::exists(cfg.output_dir / "events.csv"));
  CHECK(fs::exists(cfg.output_dir / "summary.json"));
  CHECK(res.report["total_events"].get<int>() >= 2);
}

TEST_CASE("executable exit codes") {
  const fs::path dir = TempDir("exit");
  CHECK(RunCli("spectral --preset paper-sec5 --out " + dir.string()) == 0);
  CHECK(RunCli("design-gain --preset paper-sec5 --out " + dir.string()) == 0);
  CHECK(RunCli("run --preset divergence --out " + dir.string()) == 4);
  CHECK(RunCli("run --preset nope --out " + dir.string()) == 2);

  const fs::path bad = dir / "bad.ini";
  std::ofstream(bad) << ReplaceOnce(kMinimal, "alpha = 0.4", "alpha = 5.0");
  CHECK(RunCli("run --config " + bad.string() + " --out " + dir.string()) == 3);
  const fs::path broken = dir / "broken.ini";
  std::ofstream(broken) << "[system\n";
  CHECK(RunCli("run --config " + broken.string() + " --out " + dir.string()) == 2);
  CHECK(RunCli("run --config " + (dir / "missing.ini").string()) == 2);
}

}
