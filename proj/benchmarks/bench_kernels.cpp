#include <benchmark/benchmark.h>

#include "taskfc/amuse.hpp"
#include "taskfc/ptfce.hpp"
#include "taskfc/rng.hpp"
#include "taskfc/simgen.hpp"

namespace {

using namespace taskfc;

SampledSignal random_signal(const TimeGrid& grid, std::uint32_t stream_id) {
  CounterRng rng(42, stream::kSources, stream_id);
  std::vector<double> values(grid.num_points());
  for (double& v : values) v = rng.next_normal();
  return SampledSignal(grid, std::move(values));
}

void BM_CircularConvolve(benchmark::State& state) {
  const TimeGrid grid(0.72, static_cast<int>(state.range(0)));
  const SampledSignal f = random_signal(grid, 0);
  const SampledSignal g = random_signal(grid, 1);
  for (auto _ : state) {
    auto out = circular_convolve(f, g);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_CircularConvolve)->Arg(284)->Arg(1024);

void BM_DftBand(benchmark::State& state) {
  const TimeGrid grid(0.72, static_cast<int>(state.range(0)));
  const SampledSignal f = random_signal(grid, 0);
  const auto freqs = fourier_grid(grid, default_band());
  for (auto _ : state) {
    std::complex<double> acc = 0.0;
    for (double xi : freqs) acc += dft(f, xi);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_DftBand)->Arg(284);

void BM_AmuseDecompose(benchmark::State& state) {
  const TimeGrid grid(0.72, static_cast<int>(state.range(0)));
  const SampledSignal x1 = random_signal(grid, 0);
  const SampledSignal x2 = random_signal(grid, 1);
  for (auto _ : state) {
    auto d = amuse_decompose(x1, x2, 1);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_AmuseDecompose)->Arg(284);

void BM_PtfcePair(benchmark::State& state) {
  MechanismConfig config;
  config.mechanism = Mechanism::m0;
  config.n = static_cast<int>(state.range(0));
  config.rho = {0.5};
  config.seed = 7;
  const SyntheticDataset dataset = generate_mechanism0(config);
  const SampledSignal stimulus = standard_stimuli(config.grid).task;
  const HrfSpec canonical = HrfSpec::canonical();
  for (auto _ : state) {
    auto estimate = ptfce_estimate(dataset.panel, "node1", "node2", stimulus,
                                   canonical, canonical, default_band(), 7);
    benchmark::DoNotOptimize(estimate);
  }
}
BENCHMARK(BM_PtfcePair)->Arg(50)->Arg(308)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
