#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ustat/harness.hpp"
#include "ustat/spectral.hpp"
#include "ustat/ustats.hpp"

using namespace ustat;

namespace {

std::vector<Point> uniform_points(std::size_t n) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Point> x(n);
  for (auto& p : x) p = Point(u(g));
  return x;
}

void BM_EvaluateSign(benchmark::State& state) {
  const auto x = uniform_points(static_cast<std::size_t>(state.range(0)));
  const auto stat = static_cast<StatKind>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(stat, KernelSpec::sign(), x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvaluateSign)
    ->ArgsProduct({{500, 1000, 2000}, {int(StatKind::classic), int(StatKind::cyclic), int(StatKind::bialt)}})
    ->Unit(benchmark::kMicrosecond);

void BM_EvaluateFastSign(benchmark::State& state) {
  const auto x = uniform_points(static_cast<std::size_t>(state.range(0)));
  const auto stat = static_cast<StatKind>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_fast(stat, KernelSpec::sign(), x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvaluateFastSign)
    ->ArgsProduct({{500, 2000, 100000}, {int(StatKind::classic), int(StatKind::cyclic), int(StatKind::bialt)}})
    ->Unit(benchmark::kMicrosecond);

void BM_EvaluateFastSeparable(benchmark::State& state) {
  const auto x = uniform_points(static_cast<std::size_t>(state.range(0)));
  const KernelSpec k = KernelSpec::sum(KernelSpec::product(0.3), KernelSpec::left());
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_fast(StatKind::alt_second, k, x));
}
BENCHMARK(BM_EvaluateFastSeparable)->Arg(2000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_SampleEta(benchmark::State& state) {
  const SeriesTruncation tr{static_cast<int>(state.range(0)), TailCompensation::gaussian_tail};
  for (auto _ : state) benchmark::DoNotOptimize(sample(pure_eta(), tr, 1, 1000));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SampleEta)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SampleXeta(benchmark::State& state) {
  const SeriesTruncation tr{static_cast<int>(state.range(0)), TailCompensation::gaussian_tail};
  for (auto _ : state) benchmark::DoNotOptimize(sample(pure_xeta(), tr, 1, 1000));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SampleXeta)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_NystromSignEig(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eig(nystrom(KernelSpec::sign(), SpaceSpec::uniform01(), m)));
}
BENCHMARK(BM_NystromSignEig)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_LiftedHatEig(benchmark::State& state) {
  const KernelTable t = tabulate(KernelSpec::sign(), quadrature_rule(SpaceSpec::uniform01(), 32));
  for (auto _ : state) benchmark::DoNotOptimize(eig_symmetric(build_operator(OperatorKind::hat, t, 32)));
}
BENCHMARK(BM_LiftedHatEig)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
