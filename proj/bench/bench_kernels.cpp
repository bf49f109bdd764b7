// Serial reference vs OpenMP kernels. Each benchmark takes the execution mode
// as its first argument (0 = serial, 1 = parallel).

#include <benchmark/benchmark.h>

#include "bct/biclique.hpp"
#include "bct/decompose.hpp"
#include "bct/design.hpp"
#include "bct/negraph.hpp"
#include "bct/power.hpp"

using namespace bct;

namespace {

Exec mode(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_BuildGraph(benchmark::State& state) {
  const auto clusters = three_blob_clusters();
  const auto mapping = ExposureMapping::spatial(generate_spatial_layout(clusters, 0.05, 1));
  const auto design = generate_bernoulli_assignments(1000, 1000, 0.2, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_graph(design, mapping, {1, 0}, mode(state)));
}

void BM_ScoreCandidates(benchmark::State& state) {
  const auto g = generate_random_graph(300, 300, 0.8, 0.1, 3);
  const auto cands = enumerate_maximal(g, {10, 10, 2000});
  for (auto _ : state) benchmark::DoNotOptimize(score_candidates(g, cands, mode(state)));
  state.counters["candidates"] = static_cast<double>(cands.size());
}

void BM_McPowerOracle(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(mc_power_oracle(1.0, 100, 0.05, 100000, 4, mode(state)));
}

void BM_EmpiricalAveragePower(benchmark::State& state) {
  const auto design = generate_bernoulli_assignments(300, 100, 0.5, 5);
  std::vector<std::vector<std::int8_t>> cols(design.size());
  for (std::size_t k = 0; k < design.size(); ++k)
    for (auto z : design.assignment(k)) cols[k].push_back(z ? 1 : -1);
  const SignedAssignmentView view(design.n_units(), cols);
  OutcomeModel model;
  model.tau = 0.5;
  for (auto _ : state)
    benchmark::DoNotOptimize(empirical_average_power(view, model, 0.05, 200, 6, mode(state)));
}

}  // namespace

BENCHMARK(BM_BuildGraph)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreCandidates)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McPowerOracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmpiricalAveragePower)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
