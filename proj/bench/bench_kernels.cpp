// Compares the OpenMP kernels against their serial references.
// Run: ./build/bench/bench_kernels

#include <random>

#include <benchmark/benchmark.h>

#include "burst/kernels.hpp"

namespace {

burst::Matrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  burst::Matrix x(n, d);
  for (double& v : x.data()) {
    v = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  return x;
}

void bm_gram_serial(benchmark::State& state) {
  auto x = random_matrix(static_cast<std::size_t>(state.range(0)),
                         static_cast<std::size_t>(state.range(1)), 7);
  for (auto _ : state) {
    auto k = burst::kernels::ref::gram(x);
    benchmark::DoNotOptimize(k.data().data());
  }
}

void bm_gram_parallel(benchmark::State& state) {
  auto x = random_matrix(static_cast<std::size_t>(state.range(0)),
                         static_cast<std::size_t>(state.range(1)), 7);
  for (auto _ : state) {
    auto k = burst::kernels::gram(x);
    benchmark::DoNotOptimize(k.data().data());
  }
}

void bm_sqdist_serial(benchmark::State& state) {
  auto x = random_matrix(static_cast<std::size_t>(state.range(0)),
                         static_cast<std::size_t>(state.range(1)), 11);
  for (auto _ : state) {
    auto d = burst::kernels::ref::pairwise_sqdist(x);
    benchmark::DoNotOptimize(d.data().data());
  }
}

void bm_sqdist_parallel(benchmark::State& state) {
  auto x = random_matrix(static_cast<std::size_t>(state.range(0)),
                         static_cast<std::size_t>(state.range(1)), 11);
  for (auto _ : state) {
    auto d = burst::kernels::pairwise_sqdist(x);
    benchmark::DoNotOptimize(d.data().data());
  }
}

}  // namespace

BENCHMARK(bm_gram_serial)->Args({256, 128})->Args({1024, 256});
BENCHMARK(bm_gram_parallel)->Args({256, 128})->Args({1024, 256});
BENCHMARK(bm_sqdist_serial)->Args({256, 128})->Args({1024, 256});
BENCHMARK(bm_sqdist_parallel)->Args({256, 128})->Args({1024, 256});

BENCHMARK_MAIN();
