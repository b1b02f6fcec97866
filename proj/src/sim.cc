#include "etcons/sim.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "etcons/errors.h"
#include "etcons/kernels.h"
#include "etcons/protocol.h"

namespace etcons::sim {
namespace {

long StepCount(const Scenario& s) {
  return static_cast<long>(std::floor(s.horizon / s.step + 1e-9));
}

Vec Stack(const std::vector<Vec>& x) {
  const Eigen::Index n = x.empty() ? 0 : x.front().size();
  Vec out(static_cast<Eigen::Index>(x.size()) * n);
  for (std::size_t i = 0; i < x.size(); ++i) out.segment(static_cast<Eigen::Index>(i) * n, n) = x[i];
  return out;
}

class TraceLog {
 public:
  TraceLog(const Scenario& s, SimTrace& trace) : scenario_(s), trace_(trace) {
    const long steps = StepCount(s);
    trace_.mode = s.mode;
    trace_.n_agents = s.model.n_agents();
    trace_.n = s.model.n();
    trace_.step = s.step;
    trace_.horizon = s.horizon;
    trace_.c1 = s.c1;
    trace_.alpha = s.alpha;
    trace_.times.reserve(steps + 1);
    trace_.states.reserve(steps + 1);
    trace_.error_norms.reserve(steps + 1);
    trace_.thresholds.reserve(steps + 1);
    trace_.consensus_error.reserve(steps + 1);
  }

  void Sample(double t, const std::vector<Vec>& x, std::vector<double> errors) {
    trace_.times.push_back(t);
    trace_.states.push_back(Stack(x));
    trace_.error_norms.push_back(std::move(errors));
    trace_.thresholds.push_back(scenario_.c1 * std::exp(-scenario_.alpha * t));
    trace_.consensus_error.push_back(ConsensusError(x));
  }

  void Finish() {
    Summary& sum = trace_.summary;
    sum.trigger_counts.assign(trace_.n_agents, 0);
    for (const Event& e : trace_.events) ++sum.trigger_counts[e.agent];
    sum.min_inter_event_interval = ZenoDiagnostics(trace_).min_gap;
    sum.final_consensus_error =
        trace_.consensus_error.empty() ? 0.0 : trace_.consensus_error.back();
  }

 private:
  const Scenario& scenario_;
  SimTrace& trace_;
};

bool ExceedsNorm(const std::vector<Vec>& x, double limit) {
  return std::any_of(x.begin(), x.end(), [&](const Vec& v) {
    return !std::isfinite(v.norm()) || v.norm() > limit;
  });
}

void CheckReplicas(const std::vector<protocol::AgentRuntime>& agents) {
  for (const auto& agent : agents) {
    for (const auto& [j, entry] : agent.neighbor_cache()) {
      const double diff = (entry.replica.xhat - agents[j].self().xhat).cwiseAbs().maxCoeff();
      if (diff > 1e-12) {
        throw std::logic_error("replica of agent " + std::to_string(j + 1) + " held by agent " +
                               std::to_string(agent.agent_id() + 1) + " drifted by " +
                               std::to_string(diff));
      }
    }
  }
}

class EventEngine {
 public:
  EventEngine(const Scenario& s, const RunOptions& options)
      : s_(s),
        options_(options),
        gains_(protocol::MakeAllGains(s.model)),
        x_(s.initial_states),
        stages_(4, std::vector<Vec>(s.model.n_agents())) {
    const int n_agents = s.model.n_agents();
    props_.reserve(n_agents);
    out_neighbors_.reserve(n_agents);
    for (int i = 0; i < n_agents; ++i) {
      props_.push_back(protocol::MakeStepPropagator(gains_[i].omega, s.step));
      out_neighbors_.push_back(graph::OutNeighbors(s.model.graph(), i));
      agents_.emplace_back(i, s.initial_states, s.model.graph(), s.theta_init);
    }
    inputs_ = {&s.model.a(), &gains_, &props_};
  }

  void Run(SimTrace& trace) {
    TraceLog log(s_, trace);
    const int n_agents = s_.model.n_agents();
    std::vector<int> fired;
    // Every agent triggers at the initial instant.
    for (int i = 0; i < n_agents; ++i) fired.push_back(i);
    ProcessEvents(fired, 0, 0.0, trace);
    log.Sample(0.0, x_, ErrorNorms());

    const long steps = StepCount(s_);
    const bool parallel = options_.execution == Execution::kParallel;
    for (long k = 1; k <= steps; ++k) {
      const double t = static_cast<double>(k) * s_.step;
      if (parallel) {
        kernels::AdvancePredictorsParallel(agents_, inputs_, stages_);
        kernels::IntegrateStatesParallel(s_.model, stages_, s_.step, x_);
      } else {
        kernels::AdvancePredictorsSerial(agents_, inputs_, stages_);
        kernels::IntegrateStatesSerial(s_.model, stages_, s_.step, x_);
      }
      // Pin predictor clocks to the grid; repeated += h drifts from k * h.
      for (auto& agent : agents_) {
        agent.mutable_self().time = t;
        agent.mutable_theta().time = t;
      }
      if (options_.verify_replicas) {
        kernels::AdvanceReplicas(agents_, inputs_);
        CheckReplicas(agents_);
      }

      fired.clear();
      for (int i = 0; i < n_agents; ++i) {
        const double err = protocol::MeasurementError(agents_[i], x_[i]).norm();
        if (protocol::TriggerCheck(err, t, s_.c1, s_.alpha).fired) fired.push_back(i);
      }
      ProcessEvents(fired, k, t, trace);
      log.Sample(t, x_, ErrorNorms());

      if (ExceedsNorm(x_, options_.divergence_norm)) {
        trace.diverged = true;
        trace.diverged_at = t;
        break;
      }
    }
    log.Finish();
  }

 private:
  void ProcessEvents(const std::vector<int>& fired, long k, double t, SimTrace& trace) {
    for (int i : fired) {
      const protocol::BroadcastMessage msg =
          protocol::OnTrigger(agents_[i], x_[i], t, gains_[i].omega);
      trace.events.push_back({i, t, k});
      for (int r : out_neighbors_[i]) {
        protocol::OnReceive(agents_[r], msg, x_[r], s_.model.graph(), gains_[r].omega);
      }
    }
  }

  std::vector<double> ErrorNorms() const {
    std::vector<double> out(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      out[i] = protocol::MeasurementError(agents_[i], x_[i]).norm();
    }
    return out;
  }

  const Scenario& s_;
  RunOptions options_;
  std::vector<protocol::AgentGains> gains_;
  std::vector<protocol::StepPropagator> props_;
  std::vector<std::vector<int>> out_neighbors_;
  std::vector<protocol::AgentRuntime> agents_;
  std::vector<Vec> x_;
  std::vector<std::vector<Vec>> stages_;
  kernels::AgentStepInputs inputs_;
};

void RunContinuous(const Scenario& s, const RunOptions& options, SimTrace& trace) {
  TraceLog log(s, trace);
  const std::vector<double> zeros(s.model.n_agents(), 0.0);
  std::vector<Vec> x = s.initial_states;
  log.Sample(0.0, x, zeros);
  const long steps = StepCount(s);
  for (long k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) * s.step;
    kernels::IntegrateContinuous(s.model, s.step, x);
    log.Sample(t, x, zeros);
    if (ExceedsNorm(x, options.divergence_norm)) {
      trace.diverged = true;
      trace.diverged_at = t;
      break;
    }
  }
  log.Finish();
}

}  // namespace

void ValidateScenario(const Scenario& s) {
  const int n_agents = s.model.n_agents();
  if (n_agents < 2) throw PreconditionError("scenario: consensus needs at least two agents");
  if (static_cast<int>(s.initial_states.size()) != n_agents) {
    throw DimensionError("scenario: expected " + std::to_string(n_agents) +
                         " initial states, got " + std::to_string(s.initial_states.size()));
  }
  for (std::size_t i = 0; i < s.initial_states.size(); ++i) {
    const Vec& x0 = s.initial_states[i];
    if (x0.size() != s.model.n()) {
      throw DimensionError("scenario: initial state of agent " + std::to_string(i + 1) +
                           " has dimension " + std::to_string(x0.size()) + ", expected " +
                           std::to_string(s.model.n()));
    }
    if (!x0.allFinite()) throw PreconditionError("scenario: non-finite initial state");
  }
  if (!(s.step > 0.0) || !std::isfinite(s.step)) {
    throw PreconditionError("scenario: step must be positive");
  }
  if (!(s.horizon > 0.0) || !std::isfinite(s.horizon) || s.step > s.horizon) {
    throw PreconditionError("scenario: need 0 < step <= horizon");
  }
  if (!(s.c1 > 0.0)) throw PreconditionError("scenario: c1 must be positive");
  if (!(s.alpha > 0.0)) throw PreconditionError("scenario: alpha must be positive");
  if (!graph::HasSpanningTree(s.model.graph())) {
    throw AssumptionError("scenario: graph has no directed spanning tree");
  }
  if (s.divergence_experiment) return;
  const model::ConsensusConditionReport report = model::CheckConsensusCondition(s.model);
  if (!report.holds) {
    throw AssumptionError(
        "scenario: A + lambda_s(L) BK is not Hurwitz for every nonzero Laplacian "
        "eigenvalue; mark the scenario as a divergence experiment to run it anyway");
  }
  if (s.mode == Mode::kEventTriggered) {
    const model::ClosedLoopMatrices clm = model::BuildPiW(s.model);
    if (!model::ValidateAlpha(s.alpha, clm.pi)) {
      throw AssumptionError("scenario: alpha = " + std::to_string(s.alpha) +
                            " is outside (0, -max Re(Pi)) = (0, " +
                            std::to_string(-matlib::SpectralAbscissa(clm.pi)) + ")");
    }
  }
}

SimTrace Run(const Scenario& scenario, const RunOptions& options) {
  ValidateScenario(scenario);
  SimTrace trace;
  if (scenario.mode == Mode::kContinuousBaseline) {
    RunContinuous(scenario, options, trace);
  } else {
    EventEngine(scenario, options).Run(trace);
  }
  return trace;
}

double ConsensusError(const std::vector<Vec>& states) {
  if (states.size() < 2) throw PreconditionError("consensus_error: need at least two agents");
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      worst = std::max(worst, (states[i] - states[j]).norm());
    }
  }
  return worst;
}

ZenoReport ZenoDiagnostics(const SimTrace& trace) {
  ZenoReport out;
  out.per_agent_min_gap.assign(trace.n_agents, trace.horizon);
  out.event_totals.assign(trace.n_agents, 0);
  std::vector<double> last(trace.n_agents, std::numeric_limits<double>::quiet_NaN());
  for (const Event& e : trace.events) {
    ++out.event_totals[e.agent];
    if (!std::isnan(last[e.agent])) {
      out.per_agent_min_gap[e.agent] =
          std::min(out.per_agent_min_gap[e.agent], e.time - last[e.agent]);
    }
    last[e.agent] = e.time;
  }
  out.min_gap = out.per_agent_min_gap.empty()
                    ? trace.horizon
                    : *std::min_element(out.per_agent_min_gap.begin(),
                                        out.per_agent_min_gap.end());
  return out;
}

BaselineComparison CompareBaseline(const Scenario& scenario, double threshold,
                                   const RunOptions& options) {
  BaselineComparison out;
  Scenario et = scenario;
  et.mode = Mode::kEventTriggered;
  Scenario cont = scenario;
  cont.mode = Mode::kContinuousBaseline;
  out.et_trace = Run(et, options);
  out.cont_trace = Run(cont, options);
  out.et_final_error = out.et_trace.summary.final_consensus_error;
  out.cont_final_error = out.cont_trace.summary.final_consensus_error;
  out.both_converged = !out.et_trace.diverged && !out.cont_trace.diverged &&
                       out.et_final_error < threshold && out.cont_final_error < threshold;
  return out;
}

}  // namespace etcons::sim
