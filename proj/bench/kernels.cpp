// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "deun/engine.hpp"
#include "deun/labeled_table.hpp"
#include "deun/model_io.hpp"
#include "deun/oracle.hpp"

using namespace deun;

namespace {

LabeledTable table(std::vector<int> scope, int terms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ExpLinExpr> entries;
  for (std::uint64_t k = 0; k < config_count(static_cast<int>(scope.size())); ++k) {
    ExpLinExpr e;
    for (int t = 0; t < terms; ++t) {
      e = e + ExpLinExpr::exp_of(u(rng), LinForm(0.0, {{1, u(rng)}, {2, u(rng)}}));
    }
    entries.push_back(e);
  }
  return {scope, entries};
}

std::vector<int> iota_scope(int first, int count) {
  std::vector<int> s(count);
  for (int k = 0; k < count; ++k) s[k] = first + k;
  return s;
}

void BM_CircSerial(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto a = table(iota_scope(1, k), 4, 1);
  const auto b = table(iota_scope(k / 2 + 1, k), 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(table_circ_serial(a, b));
}

void BM_CircParallel(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto a = table(iota_scope(1, k), 4, 1);
  const auto b = table(iota_scope(k / 2 + 1, k), 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(table_circ(a, b));
}

const DecisionModel& food() {
  static const DecisionModel m = parse_model(DEUN_MODELS_DIR "/food_security.json");
  return m;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const McOptions opt{static_cast<std::uint64_t>(state.range(0)), 1, false};
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_eu_serial(food(), 0, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const McOptions opt{static_cast<std::uint64_t>(state.range(0)), 1, false};
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_eu(food(), 0, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RankFood(benchmark::State& state) {
  const auto method = state.range(0) ? Method::JunctionTree : Method::Theorem1;
  const DecisionModel m = method == Method::JunctionTree ? decompose_model(food()) : food();
  for (auto _ : state) benchmark::DoNotOptimize(rank_decisions(m, method));
}

}  // namespace

BENCHMARK(BM_CircSerial)->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(BM_CircParallel)->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(BM_MonteCarloSerial)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankFood)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
