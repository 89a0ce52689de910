#include <benchmark/benchmark.h>

#include "hecke/moments.hpp"

namespace {

void BM_GenerateOrbit(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const hecke::Rational r(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(hecke::generate_orbit(q, r).size());
}
BENCHMARK(BM_GenerateOrbit)->ArgsProduct({{3, 4, 5, 7}, {50, 200}})->Unit(benchmark::kMillisecond);

void BM_CountPairsExhaustive(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const hecke::Rational r(state.range(1));
  const auto s = hecke::generate_orbit(q, r);
  for (auto _ : state) benchmark::DoNotOptimize(hecke::count_pairs(s, r).by_n.size());
}
BENCHMARK(BM_CountPairsExhaustive)->ArgsProduct({{3, 5}, {10, 20}})->Unit(benchmark::kMillisecond);

void BM_CountDeterminantLines(benchmark::State& state) {
  const hecke::Rational r(state.range(0));
  const auto s = hecke::generate_orbit(3, r);
  const hecke::RingElement n(s.context(), hecke::Integer(1));
  const hecke::Rational radii[] = {r};
  for (auto _ : state) benchmark::DoNotOptimize(hecke::count_pairs_with_determinant(s, radii, n).totals.back());
}
BENCHMARK(BM_CountDeterminantLines)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
