#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "taumax/covariance.hpp"
#include "taumax/observables.hpp"
#include "taumax/tau_max.hpp"
#include "taumax/window.hpp"

namespace {

using namespace taumax;

std::vector<double> ar1(std::size_t n, double lambda) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  std::vector<double> x(n);
  double s = 0.0;
  for (double& v : x) v = s = lambda * s + normal(gen);
  return x;
}

void BM_Autocovariance(benchmark::State& state) {
  const auto x = ar1(static_cast<std::size_t>(state.range(0)), 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(autocovariance(x, 2000));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Autocovariance)->RangeMultiplier(10)->Range(10000, 1000000)->Unit(benchmark::kMillisecond);

void BM_CrossCovariance(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  RowMatrix raw(d, 100000);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto x = ar1(100000, 0.5 + 0.05 * static_cast<double>(i));
    raw.row(i) = Eigen::Map<const Eigen::RowVectorXd>(x.data(), 100000);
  }
  const ObservableSeries s(raw);
  for (auto _ : state) benchmark::DoNotOptimize(cross_covariance_matrices(s, 2000));
}
BENCHMARK(BM_CrossCovariance)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_EstimateTau(benchmark::State& state) {
  const auto x = ar1(static_cast<std::size_t>(state.range(0)), 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tau(x));
}
BENCHMARK(BM_EstimateTau)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMillisecond);

void BM_EstimateTauAcor(benchmark::State& state) {
  const auto x = ar1(static_cast<std::size_t>(state.range(0)), 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tau_acor(x));
}
BENCHMARK(BM_EstimateTauAcor)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMillisecond);

void BM_EstimateTauMaxGauss1d(benchmark::State& state) {
  const auto q = ar1(static_cast<std::size_t>(state.range(0)), 0.905);
  RowMatrix states(static_cast<Eigen::Index>(q.size()), 1);
  for (std::size_t i = 0; i < q.size(); ++i) states(static_cast<Eigen::Index>(i), 0) = q[i] * 0.44;
  const ObservableSeries s = evaluate_observables(states, gauss1d_observables());
  for (auto _ : state) benchmark::DoNotOptimize(estimate_tau_max(s));
}
BENCHMARK(BM_EstimateTauMaxGauss1d)->RangeMultiplier(10)->Range(10000, 1000000)->Unit(benchmark::kMillisecond);

void BM_GeneralizedEig(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd b = Eigen::MatrixXd::Random(d, d);
  const Eigen::MatrixXd c0 = b * b.transpose() + Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd k = Eigen::MatrixXd::Random(d, d);
  for (auto _ : state) benchmark::DoNotOptimize(generalized_eig_max(k, c0));
}
BENCHMARK(BM_GeneralizedEig)->DenseRange(2, 16, 7);

}  // namespace
