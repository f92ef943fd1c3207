#include <vector>

#include <benchmark/benchmark.h>

#include "smcsmooth/backward.hpp"
#include "smcsmooth/cost_counter.hpp"
#include "smcsmooth/discrete_sampler.hpp"
#include "smcsmooth/filter.hpp"
#include "smcsmooth/hilbert.hpp"
#include "smcsmooth/models/linear_gaussian.hpp"
#include "smcsmooth/rng.hpp"
#include "smcsmooth/smoothers.hpp"

using namespace smc;

namespace {

struct Pair {
  LinearGaussianFK model;
  ParticleCloud prev;
  ParticleCloud cloud;
};

Pair guarniero_pair(std::size_t n) {
  Rng rng(1);
  const LinearGaussianModel lg = guarniero_model();
  LinearGaussianFK model(lg, simulate_data(lg, 20, rng).observations);
  ParticleCloud prev = initial_cloud(model, n, rng);
  for (std::size_t t = 1; t < 10; ++t) prev = bootstrap_step(model, prev, ResamplingScheme::Systematic, rng);
  ParticleCloud cloud = bootstrap_step(model, prev, ResamplingScheme::Systematic, rng);
  return {std::move(model), std::move(prev), std::move(cloud)};
}

void BM_AliasDraw(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> w(static_cast<std::size_t>(state.range(0)));
  for (auto& v : w) v = rng.uniform();
  const AliasSampler s(w);
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(rng));
}
BENCHMARK(BM_AliasDraw)->Range(16, 1 << 16);

void BM_FfbsRow(benchmark::State& state) {
  const Pair p = guarniero_pair(static_cast<std::size_t>(state.range(0)));
  CostCounter counter;
  for (auto _ : state) benchmark::DoNotOptimize(ffbs_row(p.model, p.prev, p.cloud.state(0), counter));
  state.SetItemsProcessed(static_cast<std::int64_t>(counter.evaluations()));
}
BENCHMARK(BM_FfbsRow)->Range(64, 4096);

void BM_ParisKernel(benchmark::State& state) {
  const Pair p = guarniero_pair(static_cast<std::size_t>(state.range(0)));
  const AliasSampler proposal(p.prev.weights());
  CostCounter counter;
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(paris_kernel(p.model, p.prev, p.cloud, {}, proposal, counter, rng));
  state.counters["evals_per_particle"] = benchmark::Counter(
      static_cast<double>(counter.evaluations()) / (static_cast<double>(state.iterations()) * state.range(0)));
}
BENCHMARK(BM_ParisKernel)->Range(64, 4096);

void BM_ImhpKernel(benchmark::State& state) {
  const Pair p = guarniero_pair(static_cast<std::size_t>(state.range(0)));
  const AliasSampler proposal(p.prev.weights());
  CostCounter counter;
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(imhp_kernel(p.model, p.prev, p.cloud, 2, proposal, counter, rng));
}
BENCHMARK(BM_ImhpKernel)->Range(64, 4096);

void BM_DenseFfbsKernel(benchmark::State& state) {
  const Pair p = guarniero_pair(static_cast<std::size_t>(state.range(0)));
  CostCounter counter;
  for (auto _ : state) benchmark::DoNotOptimize(ffbs_kernel(p.model, p.prev, p.cloud, counter));
}
BENCHMARK(BM_DenseFfbsKernel)->Range(64, 1024);

void BM_HilbertSort(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> pts(static_cast<std::size_t>(state.range(0)) * 2);
  for (auto& v : pts) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(hilbert_sort(pts, 2));
}
BENCHMARK(BM_HilbertSort)->Range(64, 1 << 14);

void BM_AdjacentResample(benchmark::State& state) {
  const Pair p = guarniero_pair(static_cast<std::size_t>(state.range(0)));
  Rng rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(adjacent_resample(p.cloud.states(), 2, p.cloud.weights(), rng));
}
BENCHMARK(BM_AdjacentResample)->Range(64, 1 << 14);

}  // namespace

BENCHMARK_MAIN();
