#include "uprop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uprop/errors.hpp"
#include "uprop/rng.hpp"

namespace uprop::data {

std::vector<TimeSeries> synth_cloud(std::size_t nodes, std::size_t steps, std::uint64_t seed,
                                    const SynthParams& p) {
  if (steps < 240) throw RangeError("synth_cloud needs at least 240 steps");
  constexpr std::size_t kDims = 3;
  const double two_pi = 2.0 * std::numbers::pi;
  const double shared = std::sqrt(p.traffic_correlation);
  const double own = std::sqrt(1.0 - p.traffic_correlation);
  // Stationary std of the AR(1) log-traffic component; used to put CPU on a unit scale.
  const double ar_std = p.ar_noise / std::sqrt(1.0 - p.ar_coefficient * p.ar_coefficient);
  const double cpu_scale = std::sqrt(ar_std * ar_std + 0.5 * p.seasonal_amplitude * p.seasonal_amplitude);

  std::vector<TimeSeries> out;
  out.reserve(nodes);
  for (std::size_t node = 0; node < nodes; ++node) {
    Rng rng(derive_seed({seed, node}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double phase = unit(rng) * p.period;
    const double level_in = p.base_log_level + p.node_level_spread * (2.0 * unit(rng) - 1.0);
    const double level_out = p.base_log_level + p.node_level_spread * (2.0 * unit(rng) - 1.0);

    double u_in = ar_std * gauss(rng);
    double u_out = ar_std * gauss(rng);
    double c = 0.0;

    TimeSeries s(steps, kDims);
    for (std::size_t t = 0; t < steps; ++t) {
      const double season =
          p.seasonal_amplitude * std::sin(two_pi * (static_cast<double>(t) + phase) / p.period);
      const double common = gauss(rng);
      u_in = p.ar_coefficient * u_in + p.ar_noise * (shared * common + own * gauss(rng));
      u_out = p.ar_coefficient * u_out + p.ar_noise * (shared * common + own * gauss(rng));
      c = p.cpu_ar_coefficient * c + p.cpu_noise * gauss(rng);

      const double load = (0.5 * (u_in + u_out) + season) / cpu_scale;
      const double cpu = 1.0 / (1.0 + std::exp(-(p.cpu_bias + p.cpu_gain * load + c)));

      s.set(t, 0, std::exp(level_in + season + u_in));
      s.set(t, 1, std::exp(level_out + season + u_out));
      s.set(t, 2, std::clamp(cpu, 0.0, 1.0));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TimeSeries> synth_random_walk(std::size_t count, std::size_t steps, double step_std,
                                          std::uint64_t seed) {
  std::vector<TimeSeries> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed({seed, i}));
    std::normal_distribution<double> gauss(0.0, step_std);
    TimeSeries s(steps, 1);
    double x = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
      s.set(t, 0, x);
      x += gauss(rng);
    }
    out.push_back(std::move(s));
  }
  return out;
}

TimeSeries synth_ar_seasonal(std::size_t steps, std::size_t dims, double ar, double noise,
                             double period, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TimeSeries s(steps, dims);
  std::vector<double> state(dims, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t d = 0; d < dims; ++d) {
      state[d] = ar * state[d] + noise * gauss(rng);
      const double phase = static_cast<double>(d) * period / static_cast<double>(dims + 1);
      s.set(t, d, std::sin(two_pi * (static_cast<double>(t) + phase) / period) + state[d]);
    }
  }
  return s;
}

TimeSeries inject_level_shift(const TimeSeries& series, std::size_t at, std::size_t dim,
                              double magnitude) {
  if (dim >= series.dims || at >= series.steps) throw RangeError("level shift outside series");
  TimeSeries out = series;
  for (std::size_t t = at; t < series.steps; ++t) {
    if (out.is_observed(t, dim)) out.set(t, dim, out.at(t, dim) + magnitude);
  }
  return out;
}

}  // namespace uprop::data
