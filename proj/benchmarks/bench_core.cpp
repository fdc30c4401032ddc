#include <benchmark/benchmark.h>

#include <random>

#include "uprop/forecaster.hpp"
#include "uprop/gru.hpp"
#include "uprop/rng.hpp"
#include "uprop/synth.hpp"
#include "uprop/training.hpp"

using namespace uprop;

namespace {

forecaster::UPropModel make_model(std::size_t hidden, std::size_t layers) {
  forecaster::ModelSpec spec{3, layers, hidden, 0.2, 1e-3};
  forecaster::TrainConfig tc;
  tc.window_length = 120;
  tc.lookahead = 8;
  data::NormStats norm{std::vector<double>(3, 0.0), std::vector<double>(3, 1.0)};
  return forecaster::UPropModel::create(spec, tc, norm, 7);
}

data::TimeSeries noise(std::size_t steps, std::size_t dims) {
  data::TimeSeries s(steps, dims);
  Rng rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t d = 0; d < dims; ++d) s.set(t, d, n(rng));
  }
  return s;
}

void BM_GruStackStep(benchmark::State& state) {
  const auto model = make_model(static_cast<std::size_t>(state.range(0)), 3);
  auto h = nn::zero_state(model.net.stack);
  const std::vector<double> x(6, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::gru_stack_step(model.net.stack, x, h, false, nullptr).data());
  }
}
BENCHMARK(BM_GruStackStep)->Arg(16)->Arg(32)->Arg(64);

void BM_WindowLossBackward(benchmark::State& state) {
  auto model = make_model(32, 3);
  forecaster::TrainConfig tc;
  tc.window_length = 120;
  tc.lookahead = static_cast<std::size_t>(state.range(0));
  const auto window = noise(120, 3);
  Rng rng(3);
  const auto sample = forecaster::draw_sample(tc, 3, rng, 5);
  auto grad = model.net.zeros_like();
  for (auto _ : state) {
    benchmark::DoNotOptimize(forecaster::window_loss(model, window, sample, &grad));
  }
}
BENCHMARK(BM_WindowLossBackward)->Arg(2)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_FilterSeries(benchmark::State& state) {
  const auto model = make_model(32, 3);
  auto series = noise(120, 3);
  Rng rng(9);
  std::bernoulli_distribution hide(0.3);
  for (std::size_t t = 0; t < series.steps; ++t) {
    for (std::size_t d = 0; d < series.dims; ++d) {
      if (hide(rng)) series.set_missing(t, d);
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(forecaster::filter_series(model, series).size());
}
BENCHMARK(BM_FilterSeries)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
