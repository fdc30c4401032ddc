#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uprop/data.hpp"

namespace uprop::data {

/// Parameters of the synthetic cloud-monitoring generator. Equations are in
/// docs/synthetic_data.md.
struct SynthParams {
  double period = 1440.0;           // steps per day at 1-minute resolution
  double seasonal_amplitude = 0.6;  // log-traffic units
  double ar_coefficient = 0.95;
  double ar_noise = 0.08;           // innovation std in log-traffic units
  double traffic_correlation = 0.6; // shared fraction of in/out innovations
  double base_log_level = 13.8;     // ≈ ln(1e6) bytes per minute
  double node_level_spread = 0.5;
  double cpu_bias = -0.5;
  double cpu_gain = 1.5;
  double cpu_ar_coefficient = 0.9;
  double cpu_noise = 0.1;

  friend bool operator==(const SynthParams&, const SynthParams&) = default;
};

/// One 3-channel series per node: [traffic_in, traffic_out, cpu].
/// Traffic is nonnegative and log-normal; cpu lies in [0, 1].
std::vector<TimeSeries> synth_cloud(std::size_t nodes, std::size_t steps, std::uint64_t seed,
                                    const SynthParams& params = {});

/// Independent Gaussian random walks, one 1-dim series each, starting at 0.
std::vector<TimeSeries> synth_random_walk(std::size_t count, std::size_t steps, double step_std,
                                          std::uint64_t seed);

/// AR(1) noise around a sinusoid, `dims` independent channels.
TimeSeries synth_ar_seasonal(std::size_t steps, std::size_t dims, double ar, double noise,
                             double period, std::uint64_t seed);

/// Adds `magnitude` to dimension `dim` for every step ≥ at.
TimeSeries inject_level_shift(const TimeSeries& series, std::size_t at, std::size_t dim,
                              double magnitude);

}  // namespace uprop::data
