#include <benchmark/benchmark.h>

#include <random>

#include "hecke/ring.hpp"

namespace {

std::vector<hecke::RingElement> sample(int q, long bound, std::size_t count) {
  const auto& ctx = hecke::RingContext::get(q);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> d(-bound, bound);
  std::vector<hecke::RingElement> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<hecke::Integer> c(static_cast<std::size_t>(ctx.degree()));
    for (auto& x : c) x = hecke::Integer(d(rng));
    out.emplace_back(ctx, c);
  }
  return out;
}

void BM_Multiply(benchmark::State& state) {
  const auto xs = sample(static_cast<int>(state.range(0)), state.range(1), 1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(xs[i % 1024] * xs[(i + 1) % 1024]);
    ++i;
  }
}
BENCHMARK(BM_Multiply)->ArgsProduct({{3, 5, 7, 11}, {1000, 1L << 40}});

void BM_Sign(benchmark::State& state) {
  const auto xs = sample(static_cast<int>(state.range(0)), 1000, 1024);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(hecke::sign(xs[i++ % 1024]));
}
BENCHMARK(BM_Sign)->Arg(5)->Arg(7)->Arg(11);

// Near-cancelling values force interval refinement: F(k+1) - F(k) lambda at q = 5.
void BM_SignNearZero(benchmark::State& state) {
  const auto& ctx = hecke::RingContext::get(5);
  long a = 1, b = 1;
  for (long i = 0; i < state.range(0); ++i) {
    const long c = a + b;
    a = b;
    b = c;
  }
  const hecke::Integer coeffs[] = {hecke::Integer(b), hecke::Integer(-a)};
  const hecke::RingElement x(ctx, coeffs);
  for (auto _ : state) benchmark::DoNotOptimize(hecke::sign(x));
}
BENCHMARK(BM_SignNearZero)->Arg(10)->Arg(40)->Arg(80);

}  // namespace
