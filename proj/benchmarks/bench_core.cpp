#include <benchmark/benchmark.h>

#include <vector>

#include "sfom/backaction_fit.hpp"
#include "sfom/fft.hpp"
#include "sfom/langevin.hpp"
#include "sfom/random.hpp"
#include "sfom/scenarios.hpp"
#include "sfom/spectral.hpp"
#include "sfom/tracker.hpp"

namespace {

using namespace sfom;

SimConfig long_run(CavityModel model, double rate) {
  SimConfig c;
  c.params = cooling_mode();
  c.duration = 1e3;
  c.sample_rate = rate;
  c.model = model;
  c.shot_noise_floor = 1e-30;
  return c;
}

void simulate_block(benchmark::State& state, CavityModel model, double rate) {
  Simulator sim(long_run(model, rate));
  std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim.next_block(x, y));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateAdiabatic(benchmark::State& state) { simulate_block(state, CavityModel::Adiabatic, 12e6); }
void BM_SimulateFullCavity(benchmark::State& state) { simulate_block(state, CavityModel::FullCavity, 500e6); }

void BM_RealFft(benchmark::State& state) {
  RealFft fft(static_cast<std::size_t>(state.range(0)));
  NormalStream(1, 0).fill(fft.real());
  for (auto _ : state) {
    fft.forward();
    benchmark::DoNotOptimize(fft.spectrum().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Welch(benchmark::State& state) {
  std::vector<double> record(1 << 20);
  NormalStream(2, 0).fill(record);
  WelchOptions opt;
  opt.segment_length = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(welch_psd(record, 1e6, opt));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(record.size()));
}

void BM_SweepFit(benchmark::State& state) {
  const auto params = cooling_mode();
  std::vector<double> detunings;
  for (int i = 0; i <= 40; ++i) detunings.push_back(-1.0 + i / 40.0);
  const auto data = synthetic_sweep(params, detunings, 0.05, 3);
  SweepFitOptions opt;
  opt.coupling_scale = coupling_scale(params);
  const auto fixed = sweep_fixed(params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_detuning_sweep(data, fixed, opt));
  }
}

void BM_Demodulate(benchmark::State& state) {
  const double rate = 10e6;
  std::vector<double> record(1 << 20);
  NormalStream(4, 0).fill(record);
  const auto filter = design_lowpass(rate, 200e3);
  const DemodSettings settings{482e3, 2e3, 1e-3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(demodulate(record, rate, filter, settings, MeasurementNoise{}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(record.size()));
}

}  // namespace

BENCHMARK(BM_SimulateAdiabatic)->Arg(1 << 14);
BENCHMARK(BM_SimulateFullCavity)->Arg(1 << 14);
BENCHMARK(BM_RealFft)->RangeMultiplier(16)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_Welch)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_SweepFit);
BENCHMARK(BM_Demodulate);
BENCHMARK_MAIN();
