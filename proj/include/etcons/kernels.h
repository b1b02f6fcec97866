#pragma once

// Per-agent step kernels shared by the simulation engine. Each comes in a
// serial reference form and an OpenMP form; both perform the same floating
// point operations per agent, so their outputs are bit-identical.

#include <vector>

#include "etcons/model.h"
#include "etcons/protocol.h"

namespace etcons::sim::kernels {

using matlib::Mat;
using matlib::Vec;

struct AgentStepInputs {
  const Mat* a = nullptr;
  const std::vector<protocol::AgentGains>* gains = nullptr;
  const std::vector<protocol::StepPropagator>* props = nullptr;
};

// One RK4 step of every x^ predictor plus e^{Omega h} on every live theta.
// stages[s][i] receives agent i's x^ at RK4 evaluation point s.
void AdvancePredictorsSerial(std::vector<protocol::AgentRuntime>& agents,
                             const AgentStepInputs& in,
                             std::vector<std::vector<Vec>>& stages);
void AdvancePredictorsParallel(std::vector<protocol::AgentRuntime>& agents,
                               const AgentStepInputs& in,
                               std::vector<std::vector<Vec>>& stages);

// One RK4 step of the true states with u_i from the x^ stage values.
void IntegrateStatesSerial(const model::SystemModel& model,
                           const std::vector<std::vector<Vec>>& stages,
                           double h, std::vector<Vec>& x);
void IntegrateStatesParallel(const model::SystemModel& model,
                             const std::vector<std::vector<Vec>>& stages,
                             double h, std::vector<Vec>& x);

// One RK4 step of the continuous protocol (stage inputs from stage states).
void IntegrateContinuous(const model::SystemModel& model, double h, std::vector<Vec>& x);

// Advances every neighbor replica by one step (verification only).
void AdvanceReplicas(std::vector<protocol::AgentRuntime>& agents, const AgentStepInputs& in);

}  // namespace etcons::sim::kernels
