// Serial reference versus OpenMP paths for the heavy verifier loops.
// The second argument of every benchmark selects the path: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "ozawa/verifier.hpp"

using namespace ozawa;

namespace {

Execution mode(const benchmark::State& state) { return state.range(1) == 0 ? Execution::serial : Execution::parallel; }

const TreeKernel& tree() {
  static const TreeKernel k(std::make_shared<const FreeGroup>(2));
  return k;
}

const FolnerKernel& heisenberg() {
  static const FolnerKernel k(
      std::make_shared<const FolnerSequenceProvider>(std::make_shared<const HeisenbergGroup>(), FolnerStrategy::ball));
  return k;
}

void BM_TreeGram(benchmark::State& state) {
  const auto pts = tree().group().ball(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(tree(), pts, 8, mode(state)));
  state.counters["points"] = static_cast<double>(pts.size());
}
BENCHMARK(BM_TreeGram)->ArgsProduct({{3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_HeisenbergGram(benchmark::State& state) {
  const auto pts = heisenberg().group().ball(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  heisenberg().prepare(n);
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(heisenberg(), pts, n, mode(state)));
}
BENCHMARK(BM_HeisenbergGram)->ArgsProduct({{3, 5}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_TreeCertificate(benchmark::State& state) {
  const auto pts = tree().group().ball(static_cast<std::size_t>(state.range(0)));
  const auto gram = gram_matrix(tree(), pts, 8);
  for (auto _ : state) benchmark::DoNotOptimize(certify_psd_exact(tree(), gram, mode(state)));
}
BENCHMARK(BM_TreeCertificate)->ArgsProduct({{3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_OverlapCounts(benchmark::State& state) {
  const auto pts = heisenberg().group().ball(static_cast<std::size_t>(state.range(0)));
  std::vector<FeatureColumn> cols;
  for (const auto& x : pts) cols.push_back(heisenberg().features(x, 3));
  for (auto _ : state) benchmark::DoNotOptimize(feature_overlap_counts(cols, mode(state)));
}
BENCHMARK(BM_OverlapCounts)->ArgsProduct({{1, 2}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
