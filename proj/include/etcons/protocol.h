#pragma once

// Per-agent runtime of the predictor-based event-triggered protocol.
//
// Each agent i carries two predictors:
//   * the broadcast-state predictor x^_i, reset to x_i at every trigger of i
//     and driven by the input estimate u^_i = K (a_i^* (x) I) theta_snap,
//     where theta_snap = e^{Omega_i (t - t_k^i)} theta^_i(t_k^i) is frozen at
//     i's own trigger. Everything that drives x^_i travels in the broadcast,
//     so any receiver reconstructs x^_i exactly from the message stream.
//   * the live difference predictor theta^_i, propagated by e^{Omega_i dt}
//     and rebased at every event touching i: its own triggers and every
//     reception, where the sender's block is overwritten by x_i - x_j.
//
// theta blocks are ordered by ascending agent index with i omitted.

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "etcons/matlib.h"
#include "etcons/model.h"

namespace etcons::protocol {

using matlib::Mat;
using matlib::Vec;

// Per-agent constant matrices every agent can form from the shared model.
struct AgentGains {
  Mat omega;   // Omega_i
  Mat u_gain;  // K (a_i^* (x) I_n), maps theta_i to u^_i
  Mat drive;   // B * u_gain
};

AgentGains MakeAgentGains(const model::SystemModel& model, int i);
std::vector<AgentGains> MakeAllGains(const model::SystemModel& model);

// e^{omega dt} over a fixed step, plus the half step needed by RK4 stages.
struct StepPropagator {
  double h = 0.0;
  Mat half;
  Mat full;
};
StepPropagator MakeStepPropagator(const Mat& omega, double h);

// Block offset of agent p inside agent i's theta vector.
int ThetaBlock(int i, int p);

// theta^(t) = e^{omega dt} theta^(t_rebase).
Vec PredictTheta(const Vec& rebase_value, const Mat& omega, double dt);

// Broadcast-state predictor x^ together with the theta snapshot driving u^.
struct BroadcastPredictor {
  double anchor_time = 0.0;  // t_k: the trigger that last reset it
  double time = 0.0;         // instant xhat and theta_now refer to
  Vec xhat;
  Vec theta_anchor;  // theta^(t_k) as broadcast
  Vec theta_now;     // e^{Omega (time - t_k)} theta_anchor

  void Reset(double t, const Vec& state, const Vec& theta);
};

// Estimated input u^(t) = K (a^* (x) I) e^{Omega (t - t_k)} theta^(t_k).
Vec EstimateControl(const BroadcastPredictor& pred, const AgentGains& gains, double t);

// x^ at the four RK4 evaluation points of one step, in stage order.
struct XhatStages {
  Vec at[4];
};

// One RK4 step of x^' = A x^ + B u^ over gains/prop's step. u^ is sampled
// at the stage times through the exact theta propagation.
XhatStages StepXhat(BroadcastPredictor& pred, const Mat& a, const AgentGains& gains,
                    const StepPropagator& prop);

// Advances x^ from t0 to t1 with `substeps` RK4 steps.
void AdvanceXhat(BroadcastPredictor& pred, const Mat& a, const AgentGains& gains,
                 double t0, double t1, int substeps);

// Live difference predictor.
struct ThetaPredictor {
  double rebase_time = 0.0;
  double time = 0.0;
  Vec rebase_value;
  Vec value;  // at `time`
};

struct BroadcastMessage {
  int sender = -1;
  double time = 0.0;
  Vec state;      // x_j(t_k^j)
  Vec theta_hat;  // theta^_j(t_k^j)
};

// What agent i keeps about in-neighbor j.
struct NeighborEntry {
  double time = 0.0;
  Vec state;
  Vec theta_hat;
  BroadcastPredictor replica;  // i's own reconstruction of x^_j
};

// How theta^_i(0) is seeded before the initial broadcast round.
enum class ThetaInit {
  // Exact x_i(0) - x_p(0) for every agent p (global initial knowledge).
  kGlobal,
  // Exact differences to in-neighbors only; blocks of agents whose initial
  // state agent i never receives start at zero.
  kInNeighbors,
};

class AgentRuntime {
 public:
  // Starts at t = 0 with theta^_i seeded per `init`.
  AgentRuntime(int agent_id, const std::vector<Vec>& initial_states,
               const graph::DirectedGraph& g, ThetaInit init);

  int agent_id() const { return agent_id_; }
  const BroadcastPredictor& self() const { return self_; }
  BroadcastPredictor& mutable_self() { return self_; }
  const ThetaPredictor& theta() const { return theta_; }
  ThetaPredictor& mutable_theta() { return theta_; }
  const std::map<int, NeighborEntry>& neighbor_cache() const { return cache_; }
  std::map<int, NeighborEntry>& mutable_neighbor_cache() { return cache_; }
  double last_trigger_time() const { return last_trigger_time_; }
  int trigger_count() const { return trigger_count_; }

 private:
  friend BroadcastMessage OnTrigger(AgentRuntime&, const Vec&, double, const Mat&);
  friend void OnReceive(AgentRuntime&, const BroadcastMessage&, const Vec&,
                        const graph::DirectedGraph&, const Mat&);

  int agent_id_;
  BroadcastPredictor self_;
  ThetaPredictor theta_;
  std::map<int, NeighborEntry> cache_;
  double last_trigger_time_ = 0.0;
  int trigger_count_ = 0;
};

// Brings the live theta predictor to time t (no-op if already there).
void SyncTheta(ThetaPredictor& theta, const Mat& omega, double t);

// Advances the live theta predictor by one precomputed step.
void StepTheta(ThetaPredictor& theta, const StepPropagator& prop);

// e_i = x^_i - x_i.
Vec MeasurementError(const AgentRuntime& runtime, const Vec& true_state);

struct TriggerResult {
  bool fired = false;
  double f_value = 0.0;
};

// f = ||e|| - c1 e^{-alpha t}; fires when f >= 0.
TriggerResult TriggerCheck(double error_norm, double t, double c1, double alpha);

// Resets x^_i to the true state, rebases theta^_i at t and snapshots it as
// the new u^_i driver. Returns the broadcast for i's out-neighbors.
BroadcastMessage OnTrigger(AgentRuntime& runtime, const Vec& true_state, double t,
                           const Mat& omega);

// Propagates theta^_i to msg.time, overwrites the sender block with
// own_state - msg.state, rebases, and refreshes the sender's cache entry.
void OnReceive(AgentRuntime& runtime, const BroadcastMessage& msg, const Vec& own_state,
               const graph::DirectedGraph& g, const Mat& omega);

// u_i = K sum_j a_ij (x^_i - x^_j), with x^_i taken from the runtime and
// x^_j from `xhats` (indexed by agent; entry i is ignored).
Vec ControlInput(const AgentRuntime& runtime, const model::SystemModel& model,
                 const std::vector<Vec>& xhats);

// Same sum with every x^ taken from `xhats`.
Vec CoupledInput(const model::SystemModel& model, int i, const std::vector<Vec>& xhats);

}  // namespace etcons::protocol
