#include "etcons/protocol.h"

#include <cmath>
#include <string>

#include "etcons/errors.h"

namespace etcons::protocol {

AgentGains MakeAgentGains(const model::SystemModel& model, int i) {
  const int n_agents = model.n_agents();
  const int n = model.n();
  AgentGains g;
  g.omega = model::BuildOmega(model, i);
  Mat a_star(1, n_agents - 1);
  for (int p = 0; p < n_agents; ++p) {
    if (p != i) a_star(0, ThetaBlock(i, p)) = model.graph().weight(i, p);
  }
  g.u_gain = model.k() * matlib::Kron(a_star, Mat::Identity(n, n));
  g.drive = model.b() * g.u_gain;
  return g;
}

std::vector<AgentGains> MakeAllGains(const model::SystemModel& model) {
  std::vector<AgentGains> out;
  out.reserve(model.n_agents());
  for (int i = 0; i < model.n_agents(); ++i) out.push_back(MakeAgentGains(model, i));
  return out;
}

StepPropagator MakeStepPropagator(const Mat& omega, double h) {
  if (!(h > 0.0)) throw PreconditionError("step propagator: step must be positive");
  return {h, matlib::MatExp(omega, 0.5 * h), matlib::MatExp(omega, h)};
}

int ThetaBlock(int i, int p) { return p < i ? p : p - 1; }

Vec PredictTheta(const Vec& rebase_value, const Mat& omega, double dt) {
  if (dt < 0.0) {
    throw TimeOrderError("predict_theta: negative elapsed time " + std::to_string(dt));
  }
  if (omega.cols() != rebase_value.size()) {
    throw DimensionError("predict_theta: Omega and theta dimensions differ");
  }
  if (dt == 0.0) return rebase_value;
  return matlib::MatExp(omega, dt) * rebase_value;
}

void BroadcastPredictor::Reset(double t, const Vec& state, const Vec& theta) {
  anchor_time = t;
  time = t;
  xhat = state;
  theta_anchor = theta;
  theta_now = theta;
}

Vec EstimateControl(const BroadcastPredictor& pred, const AgentGains& gains, double t) {
  if (t < pred.anchor_time) {
    throw TimeOrderError("estimate_control: t precedes the last trigger instant");
  }
  return gains.u_gain * PredictTheta(pred.theta_anchor, gains.omega, t - pred.anchor_time);
}

XhatStages StepXhat(BroadcastPredictor& pred, const Mat& a, const AgentGains& gains,
                    const StepPropagator& prop) {
  const double h = prop.h;
  const Vec theta_half = prop.half * pred.theta_now;
  const Vec theta_full = prop.full * pred.theta_now;
  const Vec drive_0 = gains.drive * pred.theta_now;
  const Vec drive_half = gains.drive * theta_half;
  const Vec drive_full = gains.drive * theta_full;

  XhatStages st;
  st.at[0] = pred.xhat;
  const Vec k1 = a * st.at[0] + drive_0;
  st.at[1] = pred.xhat + 0.5 * h * k1;
  const Vec k2 = a * st.at[1] + drive_half;
  st.at[2] = pred.xhat + 0.5 * h * k2;
  const Vec k3 = a * st.at[2] + drive_half;
  st.at[3] = pred.xhat + h * k3;
  const Vec k4 = a * st.at[3] + drive_full;

  pred.xhat += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  pred.theta_now = theta_full;
  pred.time += h;
  return st;
}

void AdvanceXhat(BroadcastPredictor& pred, const Mat& a, const AgentGains& gains,
                 double t0, double t1, int substeps) {
  if (t0 < pred.anchor_time || t1 < t0) {
    throw TimeOrderError("advance_xhat: need anchor <= t0 <= t1");
  }
  if (substeps < 1) throw PreconditionError("advance_xhat: substeps must be positive");
  if (t0 != pred.time) {
    pred.theta_now = PredictTheta(pred.theta_anchor, gains.omega, t0 - pred.anchor_time);
    pred.time = t0;
  }
  if (t1 == t0) return;
  const StepPropagator prop = MakeStepPropagator(gains.omega, (t1 - t0) / substeps);
  for (int s = 0; s < substeps; ++s) StepXhat(pred, a, gains, prop);
  pred.time = t1;
}

AgentRuntime::AgentRuntime(int agent_id, const std::vector<Vec>& initial_states,
                           const graph::DirectedGraph& g, ThetaInit init)
    : agent_id_(agent_id) {
  const int n_agents = static_cast<int>(initial_states.size());
  if (g.n_agents() != n_agents) {
    throw DimensionError("agent runtime: one initial state per agent required");
  }
  if (agent_id < 0 || agent_id >= n_agents) {
    throw std::out_of_range("agent runtime: agent index out of range");
  }
  const Eigen::Index n = initial_states[agent_id].size();
  Vec theta(static_cast<Eigen::Index>(n_agents - 1) * n);
  for (int p = 0; p < n_agents; ++p) {
    if (p == agent_id) continue;
    if (initial_states[p].size() != n) {
      throw DimensionError("agent runtime: initial states differ in dimension");
    }
    const bool known = init == ThetaInit::kGlobal || g.weight(agent_id, p) > 0.0;
    theta.segment(ThetaBlock(agent_id, p) * n, n) =
        known ? Vec(initial_states[agent_id] - initial_states[p]) : Vec::Zero(n);
  }
  theta_ = {0.0, 0.0, theta, theta};
  self_.Reset(0.0, initial_states[agent_id], theta);
}

void SyncTheta(ThetaPredictor& theta, const Mat& omega, double t) {
  if (t < theta.time) throw TimeOrderError("theta predictor: time moved backwards");
  if (t == theta.time) return;
  theta.value = PredictTheta(theta.rebase_value, omega, t - theta.rebase_time);
  theta.time = t;
}

void StepTheta(ThetaPredictor& theta, const StepPropagator& prop) {
  theta.value = prop.full * theta.value;
  theta.time += prop.h;
}

Vec MeasurementError(const AgentRuntime& runtime, const Vec& true_state) {
  return runtime.self().xhat - true_state;
}

TriggerResult TriggerCheck(double error_norm, double t, double c1, double alpha) {
  TriggerResult r;
  r.f_value = error_norm - c1 * std::exp(-alpha * t);
  r.fired = r.f_value >= 0.0;
  return r;
}

BroadcastMessage OnTrigger(AgentRuntime& runtime, const Vec& true_state, double t,
                           const Mat& omega) {
  if (t < runtime.last_trigger_time_ && runtime.trigger_count_ > 0) {
    throw TimeOrderError("on_trigger: trigger precedes the previous one");
  }
  SyncTheta(runtime.theta_, omega, t);
  runtime.theta_.rebase_time = t;
  runtime.theta_.rebase_value = runtime.theta_.value;
  runtime.self_.Reset(t, true_state, runtime.theta_.value);
  runtime.last_trigger_time_ = t;
  ++runtime.trigger_count_;
  return {runtime.agent_id_, t, true_state, runtime.theta_.value};
}

void OnReceive(AgentRuntime& runtime, const BroadcastMessage& msg, const Vec& own_state,
               const graph::DirectedGraph& g, const Mat& omega) {
  const int i = runtime.agent_id_;
  if (msg.sender < 0 || msg.sender >= g.n_agents() || msg.sender == i ||
      !(g.weight(i, msg.sender) > 0.0)) {
    throw TopologyError("on_receive: agent " + std::to_string(msg.sender + 1) +
                        " is not an in-neighbor of agent " + std::to_string(i + 1));
  }
  auto it = runtime.cache_.find(msg.sender);
  if (it != runtime.cache_.end() && msg.time < it->second.time) {
    throw TimeOrderError("on_receive: message from agent " +
                         std::to_string(msg.sender + 1) + " is older than the cache");
  }
  const Eigen::Index n = own_state.size();
  SyncTheta(runtime.theta_, omega, msg.time);
  runtime.theta_.value.segment(ThetaBlock(i, msg.sender) * n, n) = own_state - msg.state;
  runtime.theta_.rebase_time = msg.time;
  runtime.theta_.rebase_value = runtime.theta_.value;

  NeighborEntry& entry = runtime.cache_[msg.sender];
  entry.time = msg.time;
  entry.state = msg.state;
  entry.theta_hat = msg.theta_hat;
  entry.replica.Reset(msg.time, msg.state, msg.theta_hat);
}

Vec CoupledInput(const model::SystemModel& model, int i, const std::vector<Vec>& xhats) {
  if (static_cast<int>(xhats.size()) != model.n_agents()) {
    throw DimensionError("control_input: need one predictor per agent");
  }
  Vec sum = Vec::Zero(model.n());
  for (int j = 0; j < model.n_agents(); ++j) {
    const double w = model.graph().weight(i, j);
    if (w > 0.0) sum += w * (xhats[i] - xhats[j]);
  }
  return model.k() * sum;
}

Vec ControlInput(const AgentRuntime& runtime, const model::SystemModel& model,
                 const std::vector<Vec>& xhats) {
  const int i = runtime.agent_id();
  if (static_cast<int>(xhats.size()) != model.n_agents()) {
    throw DimensionError("control_input: need one predictor per agent");
  }
  Vec sum = Vec::Zero(model.n());
  for (int j = 0; j < model.n_agents(); ++j) {
    const double w = model.graph().weight(i, j);
    if (!(w > 0.0)) continue;
    if (xhats[j].size() != model.n()) {
      throw std::logic_error("control_input: missing predictor for in-neighbor " +
                             std::to_string(j + 1));
    }
    sum += w * (runtime.self().xhat - xhats[j]);
  }
  return model.k() * sum;
}

}  // namespace etcons::protocol
