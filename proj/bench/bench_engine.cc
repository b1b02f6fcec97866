// Serial vs OpenMP engine on a bidirectional ring of oscillators.

#include <benchmark/benchmark.h>

#include <cmath>

#include "etcons/model.h"
#include "etcons/sim.h"

namespace {

using etcons::matlib::Mat;
using etcons::matlib::Vec;

etcons::sim::Scenario Ring(int n_agents) {
  Mat w = Mat::Zero(n_agents, n_agents);
  for (int i = 0; i < n_agents; ++i) {
    w(i, (i + 1) % n_agents) = 1.0;
    w(i, (i + n_agents - 1) % n_agents) = 1.0;
  }
  const etcons::graph::DirectedGraph g(w);
  const Mat a = (Mat(2, 2) << 0, 1, -1, 0).finished();
  const Mat b = (Mat(2, 1) << 1, 1).finished();
  const auto design = etcons::model::DesignGain(a, b, g);
  etcons::sim::Scenario s{etcons::model::SystemModel(a, b, design.k, g), {}};
  for (int i = 0; i < n_agents; ++i) {
    const double phase = 2.0 * M_PI * i / n_agents;
    s.initial_states.push_back((Vec(2) << std::cos(phase), std::sin(phase)).finished());
  }
  const double margin = -etcons::matlib::SpectralAbscissa(etcons::model::BuildPiW(s.model).pi);
  s.alpha = 0.5 * margin;
  s.c1 = 0.5;
  s.horizon = 0.5;
  s.theta_init = etcons::protocol::ThetaInit::kInNeighbors;
  return s;
}

void BM_Engine(benchmark::State& state, etcons::sim::Execution exec) {
  const auto s = Ring(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto trace = etcons::sim::Run(s, {.execution = exec});
    benchmark::DoNotOptimize(trace.states.back());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.horizon / s.step));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Engine, serial, etcons::sim::Execution::kSerial)
    ->Arg(12)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Engine, parallel, etcons::sim::Execution::kParallel)
    ->Arg(12)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
