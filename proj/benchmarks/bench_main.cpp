#include <benchmark/benchmark.h>

#include <random>

#include "eprop/algorithms.hpp"
#include "eprop/engine.hpp"
#include "eprop/history.hpp"
#include "eprop/scaling.hpp"
#include "eprop/verification.hpp"

using namespace eprop;

namespace {

AlgoParams bench_params(std::int64_t T) {
  AlgoParams p;
  p.trace = TraceParams{0.95, 0.999, 0.0, 0.95};
  p.delays = DelayConfig{1, 0, static_cast<int>(T + 1)};
  p.opt.eta = 1e-3;
  return p;
}

template <AlgoResult (*F)(const SynapseHistories&, const AlgoParams&, double)>
void BM_Algorithm(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const std::int64_t T = 1000;
  const auto h = random_histories(rng, T, static_cast<double>(state.range(0)) / 1000.0);
  const auto p = bench_params(T);
  for (auto _ : state) benchmark::DoNotOptimize(F(h, p, 0.0));
  state.SetItemsProcessed(state.iterations() * T);
}

void BM_SparseEventUpdate(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const std::int64_t T = 1000;
  const auto h = random_histories(rng, T, static_cast<double>(state.range(0)) / 1000.0);
  const auto p = bench_params(T);
  for (auto _ : state) benchmark::DoNotOptimize(optimized_event_update(h, p, 0.0));
  state.SetItemsProcessed(state.iterations() * T);
}

void BM_ArchiveRange(benchmark::State& state) {
  RecurrentArchive a;
  for (std::int64_t t = 0; t < 10000; ++t) a.append_entry(t);
  std::int64_t lo = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(a.get_range(lo, lo + state.range(0)));
    lo = (lo + 37) % (10000 - state.range(0) - 1);
  }
}

void BM_PatternSample(benchmark::State& state) {
  NetworkConfig c;
  c.mode = state.range(0) ? SimMode::EventDriven : SimMode::TimeDriven;
  c.in.init.std = 0.5;
  c.rec.init.std = 0.5;
  PatternTaskConfig pc;
  pc.input_rate_hz = 50.0;
  const auto sample = gen_pattern_task(1, pc);
  Network net = build_network(c);
  for (auto _ : state) {
    run_sample(net, sample);
    end_iteration(net);
  }
  state.SetItemsProcessed(state.iterations() * pc.T);
  state.SetLabel(state.range(0) ? "event-driven" : "time-driven");
}

void BM_ScalingStep(benchmark::State& state) {
  ScalingConfig sc;
  sc.n_rec = 2000;
  sc.n_in = 200;
  sc.n_out = 4;
  sc.indeg_out = 500;
  sc.steps = 1000;
  ScalingOptions opt;
  const auto topo = gen_scaling_network(sc);
  const auto sample = scaling_sample(sc);
  for (auto _ : state) {
    state.PauseTiming();
    Network net = scaling_network(topo, 1, state.range(0) != 0, opt);
    state.ResumeTiming();
    run_sample(net, sample);
    if (state.range(0)) flush_plasticity(net);
  }
  state.SetItemsProcessed(state.iterations() * sc.steps);
  state.SetLabel(state.range(0) ? "plastic" : "static");
}

}  // namespace

BENCHMARK(BM_Algorithm<time_driven_gradient>)->Name("time_driven_gradient")->Arg(10)->Arg(100);
BENCHMARK(BM_Algorithm<event_driven_update>)->Name("event_driven_update")->Arg(10)->Arg(100);
BENCHMARK(BM_Algorithm<event_driven_per_spike_update>)->Name("per_spike_update")->Arg(10)->Arg(100);
BENCHMARK(BM_SparseEventUpdate)->Arg(10)->Arg(100);
BENCHMARK(BM_ArchiveRange)->Arg(10)->Arg(100);
BENCHMARK(BM_PatternSample)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScalingStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
