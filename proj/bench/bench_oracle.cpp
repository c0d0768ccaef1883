// Exhaustive worst-case subset search: serial reference against the OpenMP
// kernel, plus the greedy selection they both must agree with.

#include <benchmark/benchmark.h>

#include <random>

#include "rvpp/oracle.hpp"

namespace {

std::vector<double> losses(int T) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> v(T);
  for (double& x : v) x = u(rng);
  return v;
}

void BM_ExhaustiveSerial(benchmark::State& st) {
  auto loss = losses(static_cast<int>(st.range(0)));
  const int g = static_cast<int>(st.range(1));
  for (auto _ : st)
    benchmark::DoNotOptimize(rvpp::oracle::exhaustive_top_serial(loss, g));
  st.counters["subsets"] = static_cast<double>(
      rvpp::oracle::binomial(static_cast<int>(loss.size()), g));
}

void BM_ExhaustiveParallel(benchmark::State& st) {
  auto loss = losses(static_cast<int>(st.range(0)));
  const int g = static_cast<int>(st.range(1));
  for (auto _ : st)
    benchmark::DoNotOptimize(rvpp::oracle::exhaustive_top_parallel(loss, g));
  st.counters["subsets"] = static_cast<double>(
      rvpp::oracle::binomial(static_cast<int>(loss.size()), g));
}

void BM_Greedy(benchmark::State& st) {
  auto loss = losses(static_cast<int>(st.range(0)));
  const int g = static_cast<int>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(rvpp::oracle::greedy_top(loss, g));
}

#define SIZES Args({24, 3})->Args({24, 6})->Args({24, 9})->Unit(benchmark::kMillisecond)

BENCHMARK(BM_ExhaustiveSerial)->SIZES;
BENCHMARK(BM_ExhaustiveParallel)->SIZES;
BENCHMARK(BM_Greedy)->SIZES;

}  // namespace

BENCHMARK_MAIN();
