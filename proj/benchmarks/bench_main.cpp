#include <benchmark/benchmark.h>

#include "nbl/dynamics.hpp"
#include "nbl/network.hpp"
#include "nbl/oracle.hpp"
#include "nbl/strategy.hpp"
#include "specs.hpp"

namespace {

using namespace nbl;

void BM_SimStepDesk(benchmark::State& state) {
  const GameSpec spec = testing::desk_cournot();
  const WeightMatrix w = metropolis_weights(generate_graph(GraphKind::Ring, 5, 1.0, 1));
  const StepSchedule sched;
  SimState s = initial_state(spec, 1);
  for (auto _ : state) {
    s = sim_step(spec, w, sched, s);
    benchmark::DoNotOptimize(s.profile.flat().data());
  }
}
BENCHMARK(BM_SimStepDesk);

void BM_SimStepRing(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GameSpec spec = testing::quadratic_identity_spec(n, {0.2, 0.5, 0.8}, 1, 0.5);
  const WeightMatrix w = metropolis_weights(generate_graph(GraphKind::Ring, n, 1.0, 1));
  const StepSchedule sched;
  SimState s = initial_state(spec, 1);
  for (auto _ : state) {
    s = sim_step(spec, w, sched, s);
    benchmark::DoNotOptimize(s.profile.flat().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SimStepRing)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_BestResponseClosedForm(benchmark::State& state) {
  const GameSpec spec = testing::desk_cournot();
  const BeliefVector b = uniform_belief(3);
  const StrategyProfile x = spec.midpoint_profile();
  for (auto _ : state) benchmark::DoNotOptimize(best_response(spec, 2, x, b));
}
BENCHMARK(BM_BestResponseClosedForm);

void BM_BestResponseProjectedGradient(benchmark::State& state) {
  const GameSpec spec = testing::desk_cournot();
  const BeliefVector b = uniform_belief(3);
  const StrategyProfile x = spec.midpoint_profile();
  for (auto _ : state)
    benchmark::DoNotOptimize(best_response_projected_gradient(spec, 2, x, b));
}
BENCHMARK(BM_BestResponseProjectedGradient);

void BM_MetropolisWeights(benchmark::State& state) {
  const Graph g = generate_graph(GraphKind::ErdosRenyi, static_cast<std::size_t>(state.range(0)),
                                 0.2, 7);
  for (auto _ : state) benchmark::DoNotOptimize(metropolis_weights(g).lambda_max());
}
BENCHMARK(BM_MetropolisWeights)->Arg(10)->Arg(50)->Arg(200);

void BM_MixingBound(benchmark::State& state) {
  const WeightMatrix w = metropolis_weights(generate_graph(GraphKind::Ring, 10, 1.0, 1));
  for (auto _ : state) benchmark::DoNotOptimize(verify_mixing_bound(w, 50).max_excess);
}
BENCHMARK(BM_MixingBound);

}  // namespace

BENCHMARK_MAIN();
