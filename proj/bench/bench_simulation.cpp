#include "gbrtune/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace gbrtune;

namespace {

const std::vector<BandwidthTrace>& day_suite() {
  static const std::vector<BandwidthTrace> traces = [] {
    std::vector<BandwidthTrace> out;
    SyntheticTraceConfig c;
    for (int i = 0; i < 17; ++i) {
      c.seed = 42 + static_cast<std::uint64_t>(i);
      out.push_back(generate_synthetic_trace(c, "stream_" + std::to_string(i)));
    }
    return out;
  }();
  return traces;
}

template <SimulationResult (*Run)(std::span<const BandwidthTrace>, const SimConfig&)>
void BM_Simulation(benchmark::State& state) {
  const auto& all = day_suite();
  const std::span<const BandwidthTrace> traces(all.data(), static_cast<std::size_t>(state.range(0)));
  SimConfig config;
  config.predictor.technique = static_cast<Technique>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(Run(traces, config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(traces.size() * traces[0].size()));
  state.SetLabel(std::string(technique_name(config.predictor.technique)));
}

void Args(benchmark::internal::Benchmark* b) {
  for (Technique t : {Technique::Max, Technique::ModifiedMax, Technique::LinReg})
    for (int streams : {1, 4, 17})
      b->Args({streams, static_cast<int>(t)});
  b->Unit(benchmark::kMillisecond);
}

} // namespace

BENCHMARK(BM_Simulation<run_simulation_serial>)->Name("serial")->Apply(Args);
BENCHMARK(BM_Simulation<run_simulation>)->Name("openmp")->Apply(Args);

BENCHMARK_MAIN();
