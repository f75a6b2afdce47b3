#include <benchmark/benchmark.h>

#include "hecke/series.hpp"
#include "hecke/sym_table.hpp"

using namespace hecke;

namespace {

const KTable& table() {
  static const KTable t = KTable::load(default_ktable_path());
  return t;
}

void BM_BuildP4(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_P4(table()));
}
BENCHMARK(BM_BuildP4)->Unit(benchmark::kMillisecond);

void BM_FunctionalEquation(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(check_functional_equation(table()).passed);
}
BENCHMARK(BM_FunctionalEquation)->Unit(benchmark::kMillisecond);

void BM_ExpandGenus4(benchmark::State& state) {
  const RationalFunction rf = specialize_p(genus4_rational_function(table()), 2);
  for (auto _ : state) benchmark::DoNotOptimize(expand(rf, static_cast<int>(state.range(0)), 4));
}
BENCHMARK(BM_ExpandGenus4)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

// leaves per second of the coset walk
void BM_CountCosets(benchmark::State& state) {
  const int genus = static_cast<int>(state.range(0));
  const auto p = state.range(1);
  const int delta = static_cast<int>(state.range(2));
  EnumerationOptions options;
  options.workers = static_cast<unsigned>(state.range(3));
  std::uint64_t n = 0;
  for (auto _ : state) benchmark::DoNotOptimize(n = count_cosets(genus, p, delta, options));
  state.SetItemsProcessed(static_cast<std::int64_t>(n) * state.iterations());
}
BENCHMARK(BM_CountCosets)
    ->Args({3, 2, 2, 1})
    ->Args({4, 2, 1, 1})
    ->Args({2, 11, 2, 1})
    ->Args({4, 2, 2, 1})
    ->Args({4, 2, 2, 4})
    ->Unit(benchmark::kMillisecond);

void BM_EnumerateCosets(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_cosets(3, 2, 2).size());
}
BENCHMARK(BM_EnumerateCosets)->Unit(benchmark::kMillisecond);

void BM_SphericalT(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(spherical_T(4, 2, 1));
}
BENCHMARK(BM_SphericalT)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
