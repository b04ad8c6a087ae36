#include <benchmark/benchmark.h>

#include "taumax/datasets.hpp"
#include "taumax/samplers.hpp"
#include "taumax/targets.hpp"

namespace {

using namespace taumax;

void run(benchmark::State& state, const Target& target, SamplerKind kind, double dt) {
  ChainConfig c;
  c.step_size = dt;
  c.n_steps = 100000;
  const Eigen::VectorXd q0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(target.dimension()));
  for (auto _ : state) benchmark::DoNotOptimize(run_chain(target, kind, c, q0));
  state.SetItemsProcessed(state.iterations() * 100000);
}

void BM_GaussianChain(benchmark::State& state) {
  run(state, StdGaussianTarget(1), static_cast<SamplerKind>(state.range(0)), 0.02);
}
BENCHMARK(BM_GaussianChain)
    ->Arg(static_cast<int>(SamplerKind::em))
    ->Arg(static_cast<int>(SamplerKind::mala))
    ->Arg(static_cast<int>(SamplerKind::ghmc))
    ->Arg(static_cast<int>(SamplerKind::langevin))
    ->Unit(benchmark::kMillisecond);

void BM_LMixtureEm(benchmark::State& state) { run(state, LMixtureTarget(), SamplerKind::em, 0.02); }
BENCHMARK(BM_LMixtureEm)->Unit(benchmark::kMillisecond);

void BM_NnEm(benchmark::State& state) {
  const RegressionData d = generate_nn_fixture();
  run(state, OneNodeNNTarget(d.x, d.y), SamplerKind::em, 0.005);
}
BENCHMARK(BM_NnEm)->Unit(benchmark::kMillisecond);

}  // namespace
