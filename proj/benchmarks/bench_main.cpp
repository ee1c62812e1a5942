#include <benchmark/benchmark.h>

#include <vector>

#include "atom/experiment.hpp"
#include "atom/monitor.hpp"
#include "atom/sim.hpp"

using namespace atom;

namespace {

void BM_EventQueue(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  for (auto _ : state) {
    Engine engine;
    for (std::size_t i = 0; i < n; ++i) {
      engine.schedule(Duration{rng.uniform_int(0, 100'000)}, ChurnTick{});
    }
    std::uint64_t seen = 0;
    engine.run_until(SimTime{100'000}, [&](const Event&) { ++seen; });
    benchmark::DoNotOptimize(seen);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EventQueue)->Arg(1'000)->Arg(100'000);

void BM_FullRun(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.variability_s = static_cast<double>(state.range(0));
  cfg.malicious_pct = static_cast<double>(state.range(1)) / 100.0;
  for (auto _ : state) {
    const ExperimentReport r = run_experiment(cfg);
    benchmark::DoNotOptimize(r.totals.tp);
  }
}
BENCHMARK(BM_FullRun)->Args({10, 0})->Args({1, 30})->Unit(benchmark::kMillisecond);

void BM_GlobalSnapshot(benchmark::State& state) {
  const auto monitors = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  std::vector<LocalSnapshot> locals(monitors);
  for (LocalSnapshot& s : locals) {
    for (std::uint64_t n = 0; n < 50; ++n) s.add_node(NodeId{n});
    for (int e = 0; e < 150; ++e) {
      s.insert_edge(Edge{NodeId{rng.uniform_index(50)}, NodeId{rng.uniform_index(50)}});
    }
  }
  for (auto _ : state) {
    GlobalSnapshot g = compute_global_snapshot(locals);
    benchmark::DoNotOptimize(g.edges.size());
  }
}
BENCHMARK(BM_GlobalSnapshot)->Arg(4)->Arg(16);

}  // namespace
BENCHMARK_MAIN();
