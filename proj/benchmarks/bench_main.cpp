#include <benchmark/benchmark.h>

#include "spintrap/optimizer.hpp"
#include "spintrap/pulse_sequence.hpp"
#include "spintrap/spin_model.hpp"
#include "spintrap/tomography.hpp"

using namespace spintrap;

namespace {

const RateParams kRates{};

void BM_Propagate(benchmark::State& state) {
  const PopulationVector p = PopulationVector::electron_polarized();
  double t = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate(p, t, kRates));
    t += 1e-9;
  }
}
BENCHMARK(BM_Propagate);

void BM_PropagateNumeric(benchmark::State& state) {
  const PopulationVector p = PopulationVector::electron_polarized();
  for (auto _ : state) benchmark::DoNotOptimize(propagate_numeric(p, 0.5, kRates));
}
BENCHMARK(BM_PropagateNumeric);

void BM_Seg1(benchmark::State& state) {
  const PopulationVector p = initial_state(kRates);
  for (auto _ : state) benchmark::DoNotOptimize(run_segment(p, Segment::seg1(0.5), kRates));
}
BENCHMARK(BM_Seg1);

void BM_OptimizeLaser(benchmark::State& state) {
  const PopulationVector p = apply_swaps(initial_state(kRates), SegmentLabel::Seg1);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_laser(p, kRates, Objective::P00));
}
BENCHMARK(BM_OptimizeLaser)->Unit(benchmark::kMicrosecond);

void BM_Schedule(benchmark::State& state) {
  const PopulationVector p = initial_state(kRates);
  const auto strategy = state.range(0) == 0 ? Strategy::Interleaved : Strategy::Blocked;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        optimize_schedule(p, kRates, Objective::P00, 3, strategy, DurationOverrides{0.5, 0.46}));
  }
}
BENCHMARK(BM_Schedule)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Spectrum(benchmark::State& state) {
  const FidParams fp;
  const Fid fid = synthesize_fid({0.07, 0.33, 0.5}, fp);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(fid, fp));
}
BENCHMARK(BM_Spectrum)->Unit(benchmark::kMicrosecond);

void BM_RoundTrip(benchmark::State& state) {
  const FidParams fp;
  const Spectrum cal = calibration_spectrum(fp);
  const SpectralAmplitudes a{0.07, 0.33, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(extract_amplitudes(spectrum(synthesize_fid(a, fp), fp), fp, cal));
}
BENCHMARK(BM_RoundTrip)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
