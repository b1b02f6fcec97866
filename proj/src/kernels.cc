#include "etcons/kernels.h"

namespace etcons::sim::kernels {
namespace {

void AdvanceOne(protocol::AgentRuntime& agent, const AgentStepInputs& in,
                std::vector<std::vector<Vec>>& stages) {
  const int i = agent.agent_id();
  const auto& gains = (*in.gains)[i];
  const auto& prop = (*in.props)[i];
  protocol::XhatStages st = protocol::StepXhat(agent.mutable_self(), *in.a, gains, prop);
  for (int s = 0; s < 4; ++s) stages[s][i] = std::move(st.at[s]);
  protocol::StepTheta(agent.mutable_theta(), prop);
}

void IntegrateOne(const model::SystemModel& model, const std::vector<std::vector<Vec>>& stages,
                  double h, int i, Vec& x) {
  const Mat& a = model.a();
  const Mat& b = model.b();
  const Vec k1 = a * x + b * protocol::CoupledInput(model, i, stages[0]);
  const Vec k2 = a * (x + 0.5 * h * k1) + b * protocol::CoupledInput(model, i, stages[1]);
  const Vec k3 = a * (x + 0.5 * h * k2) + b * protocol::CoupledInput(model, i, stages[2]);
  const Vec k4 = a * (x + h * k3) + b * protocol::CoupledInput(model, i, stages[3]);
  x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

void AdvancePredictorsSerial(std::vector<protocol::AgentRuntime>& agents,
                             const AgentStepInputs& in,
                             std::vector<std::vector<Vec>>& stages) {
  for (auto& agent : agents) AdvanceOne(agent, in, stages);
}

void AdvancePredictorsParallel(std::vector<protocol::AgentRuntime>& agents,
                               const AgentStepInputs& in,
                               std::vector<std::vector<Vec>>& stages) {
  const long n = static_cast<long>(agents.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) AdvanceOne(agents[i], in, stages);
}

void IntegrateStatesSerial(const model::SystemModel& model,
                           const std::vector<std::vector<Vec>>& stages, double h,
                           std::vector<Vec>& x) {
  for (int i = 0; i < static_cast<int>(x.size()); ++i) IntegrateOne(model, stages, h, i, x[i]);
}

void IntegrateStatesParallel(const model::SystemModel& model,
                             const std::vector<std::vector<Vec>>& stages, double h,
                             std::vector<Vec>& x) {
  const int n = static_cast<int>(x.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) IntegrateOne(model, stages, h, i, x[i]);
}

void IntegrateContinuous(const model::SystemModel& model, double h, std::vector<Vec>& x) {
  const int n_agents = static_cast<int>(x.size());
  const Mat& a = model.a();
  const Mat& b = model.b();
  auto deriv = [&](const std::vector<Vec>& y, std::vector<Vec>& dy) {
    for (int i = 0; i < n_agents; ++i) {
      dy[i] = a * y[i] + b * protocol::CoupledInput(model, i, y);
    }
  };
  std::vector<Vec> k1(n_agents), k2(n_agents), k3(n_agents), k4(n_agents), y(n_agents);
  deriv(x, k1);
  for (int i = 0; i < n_agents; ++i) y[i] = x[i] + 0.5 * h * k1[i];
  deriv(y, k2);
  for (int i = 0; i < n_agents; ++i) y[i] = x[i] + 0.5 * h * k2[i];
  deriv(y, k3);
  for (int i = 0; i < n_agents; ++i) y[i] = x[i] + h * k3[i];
  deriv(y, k4);
  for (int i = 0; i < n_agents; ++i) {
    x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

void AdvanceReplicas(std::vector<protocol::AgentRuntime>& agents, const AgentStepInputs& in) {
  for (auto& agent : agents) {
    for (auto& [j, entry] : agent.mutable_neighbor_cache()) {
      protocol::StepXhat(entry.replica, *in.a, (*in.gains)[j], (*in.props)[j]);
    }
  }
}

}  // namespace etcons::sim::kernels
