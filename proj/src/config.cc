#include "etcons/config.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "etcons/errors.h"
#include "json.hpp"

namespace etcons::cli {
namespace {

using nlohmann::json;
using matlib::Mat;
using matlib::Vec;

std::string Located(const std::string& message, int line, int column) {
  if (line <= 0) return message;
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
         message;
}

struct Value {
  json data;
  int line = 0;
  int column = 0;
};

using Section = std::map<std::string, Value>;

const std::map<std::string, std::set<std::string>>& KnownKeys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"system", {"n", "m", "A", "B"}},
      {"gain", {"K", "mode", "c_margin"}},
      {"graph", {"agents", "weights", "edges"}},
      {"trigger", {"c1", "alpha"}},
      {"sim", {"horizon", "step", "mode", "initial_states", "divergence_experiment", "theta_init"}},
      {"output", {"dir", "emit"}},
  };
  return keys;
}

// Drops a trailing `#` comment, ignoring `#` inside JSON strings.
std::string StripComment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

int BracketDepth(const std::string& text) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      ++depth;
    } else if (c == ']' || c == '}') {
      --depth;
    }
  }
  return depth;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool IsIdentifier(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

std::map<std::string, Section> Tokenize(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) lines.push_back(StripComment(line));
  }

  std::map<std::string, Section> sections;
  std::string current;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const std::string& raw = lines[li];
    const std::string line = Trim(raw);
    if (line.empty()) continue;
    const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;

    if (line.front() == '[') {
      if (line.back() != ']' || !IsIdentifier(line.substr(1, line.size() - 2))) {
        throw ConfigError("malformed section header '" + line + "'", line_no, indent);
      }
      current = line.substr(1, line.size() - 2);
      if (!KnownKeys().count(current)) {
        throw ConfigError("unknown section [" + current + "]", line_no, indent);
      }
      if (sections.count(current)) {
        throw ConfigError("duplicate section [" + current + "]", line_no, indent);
      }
      sections[current];
      continue;
    }

    const auto eq = raw.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value'", line_no, indent);
    }
    const std::string key = Trim(raw.substr(0, eq));
    if (!IsIdentifier(key)) throw ConfigError("invalid key '" + key + "'", line_no, indent);
    if (current.empty()) {
      throw ConfigError("key '" + key + "' appears before any [section]", line_no, indent);
    }
    if (!KnownKeys().at(current).count(key)) {
      throw ConfigError("unknown key '" + key + "' in [" + current + "]", line_no, indent);
    }
    if (sections[current].count(key)) {
      throw ConfigError("duplicate key '" + key + "' in [" + current + "]", line_no, indent);
    }

    const std::size_t vstart = raw.find_first_not_of(" \t", eq + 1);
    if (vstart == std::string::npos) {
      throw ConfigError("missing value for '" + key + "'", line_no,
                        static_cast<int>(eq) + 2);
    }
    const int value_col = static_cast<int>(vstart) + 1;
    std::string value_text = raw.substr(vstart);
    while (BracketDepth(value_text) > 0 && li + 1 < lines.size()) {
      value_text += '\n';
      value_text += lines[++li];
    }
    if (BracketDepth(value_text) != 0) {
      throw ConfigError("unbalanced brackets in value of '" + key + "'", line_no, value_col);
    }

    Value v;
    v.line = line_no;
    v.column = value_col;
    try {
      v.data = json::parse(value_text);
    } catch (const json::parse_error& e) {
      // e.byte is the 1-based offset of the offending character.
      const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
      const std::string head = value_text.substr(0, std::min(byte, value_text.size()));
      const auto newlines = std::count(head.begin(), head.end(), '\n');
      int col = value_col + static_cast<int>(byte);
      if (newlines > 0) col = static_cast<int>(head.size() - head.rfind('\n'));
      throw ConfigError("syntax error in value of '" + key + "'",
                        line_no + static_cast<int>(newlines), col);
    }
    sections[current][key] = std::move(v);
  }
  return sections;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Section> sections) : sections_(std::move(sections)) {}

  bool Has(const std::string& sec, const std::string& key) const {
    auto it = sections_.find(sec);
    return it != sections_.end() && it->second.count(key);
  }

  const Value& Get(const std::string& sec, const std::string& key) const {
    if (!Has(sec, key)) throw ConfigError("missing required field [" + sec + "] " + key);
    return sections_.at(sec).at(key);
  }

  [[noreturn]] void Fail(const std::string& sec, const std::string& key,
                         const std::string& message) const {
    const Value& v = Get(sec, key);
    throw ConfigError("[" + sec + "] " + key + ": " + message, v.line, v.column);
  }

  double Number(const std::string& sec, const std::string& key) const {
    const Value& v = Get(sec, key);
    if (!v.data.is_number()) Fail(sec, key, "expected a number");
    return v.data.get<double>();
  }

  double NumberOr(const std::string& sec, const std::string& key, double fallback) const {
    return Has(sec, key) ? Number(sec, key) : fallback;
  }

  int Integer(const std::string& sec, const std::string& key) const {
    const Value& v = Get(sec, key);
    if (!v.data.is_number_integer()) Fail(sec, key, "expected an integer");
    return v.data.get<int>();
  }

  std::string String(const std::string& sec, const std::string& key) const {
    const Value& v = Get(sec, key);
    if (!v.data.is_string()) Fail(sec, key, "expected a string");
    return v.data.get<std::string>();
  }

  bool BoolOr(const std::string& sec, const std::string& key, bool fallback) const {
    if (!Has(sec, key)) return fallback;
    const Value& v = Get(sec, key);
    if (!v.data.is_boolean()) Fail(sec, key, "expected true or false");
    return v.data.get<bool>();
  }

  Mat Matrix(const std::string& sec, const std::string& key) const {
    const json& j = Get(sec, key).data;
    if (!j.is_array() || j.empty()) Fail(sec, key, "expected a non-empty array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) Fail(sec, key, "expected rows written as arrays, e.g. [[1, 0], [0, 1]]");
    Mat out(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
      if (!j[r].is_array() || j[r].size() != cols) {
        Fail(sec, key, "row " + std::to_string(r + 1) + " does not have " +
                           std::to_string(cols) + " entries");
      }
      for (std::size_t c = 0; c < cols; ++c) {
        if (!j[r][c].is_number()) {
          Fail(sec, key, "entry (" + std::to_string(r + 1) + ", " + std::to_string(c + 1) +
                             ") is not a number");
        }
        out(r, c) = j[r][c].get<double>();
      }
    }
    if (!out.allFinite()) Fail(sec, key, "entries must be finite");
    return out;
  }

  void ExpectShape(const std::string& sec, const std::string& key, const Mat& m,
                   Eigen::Index rows, Eigen::Index cols) const {
    if (m.rows() != rows || m.cols() != cols) {
      Fail(sec, key, "dimension mismatch: expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
    }
  }

 private:
  std::map<std::string, Section> sections_;
};

graph::DirectedGraph ReadGraph(const Reader& r) {
  const bool has_weights = r.Has("graph", "weights");
  const bool has_edges = r.Has("graph", "edges");
  if (has_weights == has_edges) {
    throw ConfigError("[graph] needs exactly one of 'weights' or 'edges'");
  }
  if (has_weights) {
    const Mat w = r.Matrix("graph", "weights");
    if (w.rows() != w.cols()) r.Fail("graph", "weights", "weight matrix must be square");
    if (r.Has("graph", "agents") && r.Integer("graph", "agents") != w.rows()) {
      r.Fail("graph", "weights", "size disagrees with [graph] agents");
    }
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      if (w(i, i) != 0.0) {
        r.Fail("graph", "weights",
               "self-loop a_" + std::to_string(i + 1) + std::to_string(i + 1) +
                   " must be 0");
      }
    }
    if ((w.array() < 0.0).any()) r.Fail("graph", "weights", "weights must be nonnegative");
    return graph::DirectedGraph(w);
  }

  const int n_agents = r.Integer("graph", "agents");
  if (n_agents < 1) r.Fail("graph", "agents", "need at least one agent");
  const json& edges = r.Get("graph", "edges").data;
  if (!edges.is_array()) r.Fail("graph", "edges", "expected an array of [i, j] or [i, j, w]");
  std::vector<graph::DirectedGraph::Edge> list;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const json& e = edges[k];
    const std::string where = "edge " + std::to_string(k + 1);
    if (!e.is_array() || e.size() < 2 || e.size() > 3 || !e[0].is_number_integer() ||
        !e[1].is_number_integer() || (e.size() == 3 && !e[2].is_number())) {
      r.Fail("graph", "edges", where + " must be [receiver, sender] or [receiver, sender, weight]");
    }
    const int i = e[0].get<int>();
    const int j = e[1].get<int>();
    const double w = e.size() == 3 ? e[2].get<double>() : 1.0;
    if (i < 1 || i > n_agents || j < 1 || j > n_agents) {
      r.Fail("graph", "edges", where + " references an agent outside 1.." +
                                   std::to_string(n_agents));
    }
    if (i == j) r.Fail("graph", "edges", where + " is a self-loop");
    if (!(w > 0.0) || !std::isfinite(w)) r.Fail("graph", "edges", where + " weight must be positive");
    list.push_back({i - 1, j - 1, w});
  }
  return graph::DirectedGraph::FromEdges(n_agents, list);
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line, int column)
    : std::runtime_error(Located(message, line, column)), line_(line), column_(column) {}

RunConfig ParseConfig(std::string_view text, Purpose purpose, std::string name) {
  const Reader r(Tokenize(text));
  const bool simulate = purpose == Purpose::kSimulation;

  const Mat a = r.Matrix("system", "A");
  if (a.rows() != a.cols()) r.Fail("system", "A", "A must be square");
  const Eigen::Index n = a.rows();
  if (r.Has("system", "n") && r.Integer("system", "n") != n) {
    r.Fail("system", "n", "disagrees with A (" + std::to_string(n) + "x" + std::to_string(n) + ")");
  }
  const Mat b = r.Matrix("system", "B");
  if (b.rows() != n) r.Fail("system", "B", "B must have n = " + std::to_string(n) + " rows");
  const Eigen::Index m = b.cols();
  if (r.Has("system", "m") && r.Integer("system", "m") != m) {
    r.Fail("system", "m", "disagrees with B's column count " + std::to_string(m));
  }

  const graph::DirectedGraph g = ReadGraph(r);
  const int n_agents = g.n_agents();
  if (n_agents < 2) throw ConfigError("[graph] consensus needs at least two agents");
  if (!graph::HasSpanningTree(g)) {
    throw AssumptionError("assumption violated: graph has no directed spanning tree");
  }

  GainMode gain_mode = GainMode::kExplicit;
  if (r.Has("gain", "mode")) {
    const std::string mode = r.String("gain", "mode");
    if (mode == "auto") {
      gain_mode = GainMode::kAuto;
    } else if (mode != "explicit") {
      r.Fail("gain", "mode", "expected \"explicit\" or \"auto\"");
    }
  }
  const double c_margin = r.NumberOr("gain", "c_margin", model::kDefaultCMargin);
  if (!(c_margin > 0.0)) r.Fail("gain", "c_margin", "must be positive");

  std::optional<model::GainDesign> design;
  Mat k;
  if (gain_mode == GainMode::kAuto) {
    if (r.Has("gain", "K")) r.Fail("gain", "K", "K must be omitted when mode = \"auto\"");
    design = model::DesignGain(a, b, g, c_margin);
    k = design->k;
  } else {
    if (!r.Has("gain", "K")) {
      throw ConfigError("missing required field [gain] K (or set mode = \"auto\")");
    }
    k = r.Matrix("gain", "K");
    r.ExpectShape("gain", "K", k, m, n);
  }

  model::SystemModel model(a, b, k, g);

  std::vector<Vec> initial;
  const bool has_sim = r.Has("sim", "initial_states");
  if (has_sim) {
    const Mat x0 = r.Matrix("sim", "initial_states");
    r.ExpectShape("sim", "initial_states", x0, n_agents, n);
    for (int i = 0; i < n_agents; ++i) initial.push_back(x0.row(i).transpose());
  } else if (simulate) {
    throw ConfigError("missing required field [sim] initial_states");
  }

  sim::Mode mode = sim::Mode::kEventTriggered;
  if (r.Has("sim", "mode")) {
    const std::string s = r.String("sim", "mode");
    if (s == "continuous_baseline") {
      mode = sim::Mode::kContinuousBaseline;
    } else if (s != "event_triggered") {
      r.Fail("sim", "mode", "expected \"event_triggered\" or \"continuous_baseline\"");
    }
  }

  double c1 = 0.0;
  double alpha = 0.0;
  if (simulate || r.Has("trigger", "c1")) c1 = r.Number("trigger", "c1");
  if (simulate || r.Has("trigger", "alpha")) alpha = r.Number("trigger", "alpha");
  if (r.Has("trigger", "c1") && !(c1 > 0.0)) r.Fail("trigger", "c1", "must be positive");
  if (r.Has("trigger", "alpha") && !(alpha > 0.0)) r.Fail("trigger", "alpha", "must be positive");

  const double horizon = r.NumberOr("sim", "horizon", sim::kDefaultHorizon);
  const double step = r.NumberOr("sim", "step", sim::kDefaultStep);
  if (!(step > 0.0)) r.Fail("sim", "step", "must be positive");
  if (!(horizon >= step)) throw ConfigError("[sim] need 0 < step <= horizon");

  RunConfig cfg{
      .name = std::move(name),
      .scenario = sim::Scenario{model, initial, c1, alpha, horizon, step, mode,
                                r.BoolOr("sim", "divergence_experiment", false)},
      .gain_mode = gain_mode,
      .c_margin = c_margin,
      .design = design,
      .has_simulation_fields = has_sim && r.Has("trigger", "c1") && r.Has("trigger", "alpha"),
  };

  if (r.Has("sim", "theta_init")) {
    const std::string init = r.String("sim", "theta_init");
    if (init == "in_neighbors") {
      cfg.scenario.theta_init = protocol::ThetaInit::kInNeighbors;
    } else if (init != "global") {
      r.Fail("sim", "theta_init", "expected \"in_neighbors\" or \"global\"");
    }
  }

  if (r.Has("output", "dir")) cfg.output_dir = r.String("output", "dir");
  if (r.Has("output", "emit")) {
    const json& emit = r.Get("output", "emit").data;
    if (!emit.is_array()) r.Fail("output", "emit", "expected an array of names");
    cfg.emit_trace_csv = cfg.emit_events_csv = cfg.emit_summary = false;
    for (const json& e : emit) {
      const std::string s = e.is_string() ? e.get<std::string>() : "";
      if (s == "trace_csv") {
        cfg.emit_trace_csv = true;
      } else if (s == "events_csv") {
        cfg.emit_events_csv = true;
      } else if (s == "summary") {
        cfg.emit_summary = true;
      } else {
        r.Fail("output", "emit", "unknown output '" + e.dump() +
                                     "' (expected trace_csv, events_csv, summary)");
      }
    }
  }

  if (simulate) {
    try {
      sim::ValidateScenario(cfg.scenario);
    } catch (const AssumptionError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return cfg;
}

RunConfig LoadConfigFile(const std::filesystem::path& path, Purpose purpose) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(), purpose, path.stem().string());
}

std::vector<std::string> PresetNames() {
  return {"paper-sec5", "paper-sec5-auto", "divergence"};
}

namespace {

constexpr const char* kExampleCommon = R"(
[system]
n = 2
m = 1
A = [[0, 1], [-1, 0]]
B = [[1], [1]]

[graph]
agents = 6
weights = [[0, 0, 0, 1, 1, 1],
           [1, 0, 0, 0, 0, 0],
           [1, 1, 0, 0, 0, 0],
           [1, 0, 0, 0, 0, 0],
           [0, 0, 0, 1, 0, 0],
           [0, 0, 0, 0, 1, 0]]

[trigger]
c1 = 0.6
alpha = 0.4

[sim]
horizon = 20.0
step = 0.001
mode = "event_triggered"
initial_states = [[0.4, 0.3], [0.5, 0.2], [0.6, 0.1],
                  [0.7, 0.0], [0.8, -0.1], [0.4, -0.2]]
)";

}  // namespace

std::string PresetText(std::string_view name) {
  if (name == "paper-sec5") {
    return std::string("# Six-agent reproduction with the published gain.\n") + kExampleCommon +
           "\n[gain]\nK = [[-2.2, -1.1]]\n";
  }
  if (name == "paper-sec5-auto") {
    return std::string("# Six-agent scenario with a Riccati-designed gain.\n") + kExampleCommon +
           "\n[gain]\nmode = \"auto\"\nc_margin = 0.5\n";
  }
  if (name == "divergence") {
    return R"(# Necessity experiment: zero gain on an unstable plant never agrees.
[system]
A = [[1, 1], [-1, 1]]
B = [[1], [1]]

[gain]
K = [[0, 0]]

[graph]
agents = 6
edges = [[1, 4], [1, 5], [1, 6], [2, 1], [3, 1], [3, 2], [4, 1], [5, 4], [6, 5]]

[trigger]
c1 = 0.6
alpha = 0.4

[sim]
horizon = 40.0
step = 0.001
mode = "event_triggered"
divergence_experiment = true
initial_states = [[0.4, 0.3], [0.5, 0.2], [0.6, 0.1],
                  [0.7, 0.0], [0.8, -0.1], [0.4, -0.2]]
)";
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

RunConfig LoadPreset(std::string_view name, Purpose purpose) {
  return ParseConfig(PresetText(name), purpose, std::string(name));
}

}  // namespace etcons::cli
