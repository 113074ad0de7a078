// Serial vs OpenMP kernels on benchmark-sized inputs.
#include <benchmark/benchmark.h>

#include "fairsel/ci_test.hpp"
#include "fairsel/classifier.hpp"
#include "fairsel/metrics.hpp"
#include "fairsel/scm.hpp"
#include "fairsel/selector.hpp"

namespace {

using namespace fairsel;

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

void set_label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

const Benchmark& instance() {
  static const Benchmark b = gen_benchmark(256, 0.1, 1);
  return b;
}

const Dataset& data() {
  static const Dataset d = sample(instance().model, 20000, 1);
  return d;
}

void BM_Sample(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sample(instance().model, 50000, 2, exec_of(state)));
  set_label(state);
}

void BM_PartialCorrelations(benchmark::State& state) {
  const Dataset& d = data();
  std::vector<std::size_t> x;
  for (std::size_t j = 2; j < d.cols() - 1; ++j) x.push_back(j);
  for (auto _ : state) benchmark::DoNotOptimize(partial_correlations(d, x, {0}, {1}, exec_of(state)));
  set_label(state);
}

void BM_SeqSelFisherZ(benchmark::State& state) {
  const FisherZTester tester(data(), Exec::Serial);
  const RoleAssignment roles = roles_from_dag(instance().model.dag());
  SelectionOptions o;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(seq_sel(tester, roles, o));
  set_label(state);
}

void BM_BenchCounts(benchmark::State& state) {
  BenchGrid grid;
  grid.n_grid = {512};
  grid.p_grid = {0.05};
  grid.seeds = {0, 1, 2, 3, 4, 5, 6, 7};
  for (auto _ : state) benchmark::DoNotOptimize(bench_counts(grid, exec_of(state)));
  set_label(state);
}

void BM_InterventionalGap(benchmark::State& state) {
  const ScmSpec& spec = instance().model;
  const Dataset& d = data();
  std::vector<std::string> features;
  for (const auto& c : d.columns())
    if (c.role == Role::Admissible || c.role == Role::Candidate) features.push_back(c.name);
  TrainConfig tc;
  tc.iterations = 200;
  const LogRegModel model = train(d, features, "Y", tc);
  const auto a = enumerate_assignments(spec, {"A"});
  const auto s = enumerate_assignments(spec, {"S"});
  for (auto _ : state) benchmark::DoNotOptimize(interventional_gap(spec, model, a, s, 20000, 3, exec_of(state)));
  set_label(state);
}

BENCHMARK(BM_Sample)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PartialCorrelations)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeqSelFisherZ)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BenchCounts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InterventionalGap)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
